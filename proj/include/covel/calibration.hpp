#pragma once

// Bootstrap calibration of the empirical-likelihood test (BCEL).

#include <cstdint>
#include <vector>

#include "covel/elcore.hpp"

namespace covel {

struct BootstrapResult {
  double observed = 0.0;
  /// Replicate statistics, sorted descending (+inf for infeasible resamples).
  std::vector<double> replicates;
  double threshold = 0.0;
  bool reject = false;
  int B = 0;
  double gamma = 0.05;
  /// 1-based rank (from the top) of the replicate used as threshold.
  int threshold_rank = 1;
};

/// 1-based rank from the top of the bootstrap critical value:
/// ceil(B * gamma), at least 1. With B = 300, gamma = 0.05 this is 15.
int bootstrap_threshold_rank(int B, double gamma);

/// Resamples N pairs with replacement B times, recentres every resample at
/// the original sample mean, and rejects when the observed statistic
/// exceeds the ceil(B*gamma)-th largest replicate statistic. Replicate b
/// draws from Stream::substream(seed, b, bootstrap); results do not depend
/// on `threads`.
BootstrapResult bootstrap_calibrate(const ConstraintSet& pairs, int B,
                                    double gamma, std::uint64_t seed,
                                    unsigned threads = 1);

}  // namespace covel
