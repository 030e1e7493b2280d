#include "covel/calibration.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "covel/rng.hpp"

namespace covel {

int bootstrap_threshold_rank(int B, double gamma) {
  if (B < 1) throw Error(ErrorCode::bad_args, "bootstrap needs B >= 1");
  if (!(gamma > 0.0 && gamma < 1.0)) {
    throw Error(ErrorCode::bad_probability, "gamma must lie in (0, 1)");
  }
  // guard against B*gamma landing a rounding error above an integer
  const int rank = int(std::ceil(double(B) * gamma - 1e-9));
  return std::clamp(rank, 1, B);
}

BootstrapResult bootstrap_calibrate(const ConstraintSet& pairs, int B,
                                    double gamma, std::uint64_t seed,
                                    unsigned threads) {
  BootstrapResult out;
  out.threshold_rank = bootstrap_threshold_rank(B, gamma);
  out.B = B;
  out.gamma = gamma;
  out.observed = el_statistic(pairs);

  const Index n = pairs.size();
  const Eigen::RowVector2d centre = pairs.pairs.colwise().mean();
  out.replicates.assign(std::size_t(B), 0.0);
  parallel_for(std::size_t(B), threads, [&](std::size_t b) {
    Stream rng = Stream::substream(seed, b, StreamRole::bootstrap);
    Eigen::MatrixX2d resample(n, 2);
    for (Index i = 0; i < n; ++i) {
      resample.row(i) = pairs.pairs.row(Index(rng.below(std::uint64_t(n)))) - centre;
    }
    out.replicates[b] = el_statistic(resample);
  });

  std::sort(out.replicates.begin(), out.replicates.end(), std::greater<>());
  out.threshold = out.replicates[std::size_t(out.threshold_rank - 1)];
  out.reject = out.observed > out.threshold;
  return out;
}

}  // namespace covel
