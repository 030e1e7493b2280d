#pragma once

// Random-data generators for the three simulation designs.

#include <string>

#include "covel/covmodel.hpp"
#include "covel/rng.hpp"

namespace covel {

enum class Design { identity_alt, banded_alt, sparse_alt };

const char* to_string(Design d);
Design parse_design(const std::string& name);

/// sigma_ij = rho^|i-j| for |i-j| < tau, zero otherwise.
SymMatrix ar_banded_cov(Index p, double rho, Index tau);

/// Covariance of the moving sums W-bar_j = sum_{i=j}^{j+k} W_i / sqrt(k):
/// (k + 1 - |a-b|)^+ / k.
SymMatrix moving_sum_cov(Index p, Index k);

/// Zero-mean Gaussian sampler with a cached factor F, sigma = F F'.
/// Uses Cholesky when sigma is positive definite and pivoted LDL' for
/// semidefinite input; throws NotPSD when a pivot is below -1e-10 (relative
/// to the largest diagonal entry).
class MvNormal {
 public:
  explicit MvNormal(const SymMatrix& sigma);

  Index dim() const { return factor_.rows(); }
  const Eigen::MatrixXd& factor() const { return factor_; }

  /// n x p sample; rows i.i.d. N(0, sigma).
  SampleMatrix sample(Index n, Stream& rng) const;

 private:
  Eigen::MatrixXd factor_;
  Index lower_bandwidth_ = 0;
  bool banded_ = false;
};

SampleMatrix mvnormal_sample(const SymMatrix& sigma, Index n, Stream& rng);

/// Keys the per-role substreams of one replicate.
struct ReplicateKey {
  std::uint64_t seed = 0;
  std::uint64_t index = 0;

  Stream stream(StreamRole role) const {
    return Stream::substream(seed, index, role);
  }
};

struct DesignParams {
  Design design = Design::identity_alt;
  Index n = 0;
  Index p = 0;
  Index tau = 1;
  Index k = 0;  // banded_alt only
  double delta = 0.0;
};

/// Population covariance of one row under the design.
///   identity_alt: I + (delta^2 / sqrt(n)) AR
///   banded_alt:   AR + (delta^2 / sqrt(n)) MA_k
///   sparse_alt:   AR + delta^2 (e_1 + e_{tau+1})(e_1 + e_{tau+1})'
/// where AR = ar_banded_cov(p, 0.5, tau) and MA_k = moving_sum_cov(p, k).
SymMatrix design_covariance(const DesignParams& d);

/// Draws replicate samples for one design; factors are computed once.
class DesignGenerator {
 public:
  explicit DesignGenerator(const DesignParams& params);

  const DesignParams& params() const { return params_; }
  SampleMatrix draw(const ReplicateKey& key) const;

 private:
  DesignParams params_;
  MvNormal ar_;
};

/// Rows W1 + (delta / n^{1/4}) W2, W1 ~ N(0, I), W2 ~ N(0, AR).
SampleMatrix gen_identity_alt(Index n, Index p, Index tau, double delta,
                              const ReplicateKey& key);

/// Rows W~ + (delta / n^{1/4}) W-bar with W~ ~ N(0, AR) and W-bar the
/// (k+1)-term moving sums over sqrt(k).
SampleMatrix gen_banded_alt(Index n, Index p, Index tau, Index k, double delta,
                            const ReplicateKey& key);

/// Rows W~ + delta * g (e_1 + e_{tau+1}), g ~ N(0, 1) independent of W~.
SampleMatrix gen_sparse_alt(Index n, Index p, Index tau, double delta,
                            const ReplicateKey& key);

}  // namespace covel
