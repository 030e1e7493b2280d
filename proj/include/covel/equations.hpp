#pragma once

// Builders for the per-pair constraint vectors R_i = (e_i, v_i) that feed
// the empirical-likelihood solver.

#include <optional>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "covel/covmodel.hpp"

namespace covel {

enum class Method { L1, L2, L3, L4, L5, sparse };

const char* to_string(Method m);

struct KnownMean {
  Eigen::VectorXd mu;
};
struct UnknownMean {};
using MeanMode = std::variant<KnownMean, UnknownMean>;

/// Weight vector w of the linear estimating equation w'(Y_i + Y_{N+i} - 2S)w.
/// A default-constructed functional means the all-ones vector.
class LinearFunctional {
 public:
  LinearFunctional() = default;
  explicit LinearFunctional(Eigen::VectorXd w);

  static LinearFunctional ones() { return {}; }

  bool is_ones() const { return !w_.has_value(); }
  /// Weights resolved for dimension p; throws on length mismatch.
  Eigen::VectorXd weights(Index p) const;

 private:
  std::optional<Eigen::VectorXd> w_;
};

struct ConstraintMeta {
  Index p = 0;
  std::optional<Index> tau;
  std::string target;
  /// Positions (row, col), zero-based, used by the sparse-adaptive builder.
  std::vector<std::pair<Index, Index>> positions;
};

/// N pairs, one per row: column 0 is e_i, column 1 is v_i.
struct ConstraintSet {
  Eigen::MatrixX2d pairs;
  Method method = Method::L1;
  ConstraintMeta meta;

  Index size() const { return pairs.rows(); }
  auto e() const { return pairs.col(0); }
  auto v() const { return pairs.col(1); }
};

/// L1: e_i = tr((Y_i - S0)(Y_{N+i} - S0)), v_i = w'(Y_i + Y_{N+i} - 2 S0)w
/// with Y_i = (X_i - mu)(X_i - mu)'.
ConstraintSet build_known_mean(const SampleMatrix& data,
                               const Eigen::VectorXd& mu,
                               const SymMatrix& sigma0,
                               const LinearFunctional& w = {});

/// L2: as L1 with each half centred at its own sample mean and the target
/// scaled by (N-1)/N.
ConstraintSet build_unknown_mean(const SampleMatrix& data,
                                 const SymMatrix& sigma0,
                                 const LinearFunctional& w = {});

/// L3 (known mean) / L4 (unknown mean): both components restricted to the
/// band mask |i-j| >= tau. `target` defaults to zero, the null value of
/// the masked covariance; only its masked part is used.
ConstraintSet build_banded(const SampleMatrix& data, Index tau,
                           const MeanMode& mean, const LinearFunctional& w = {},
                           const std::optional<SymMatrix>& target = {});

/// L5: band-masked e component, corner-masked v component. Unknown mean by
/// default; a known mean is accepted for plug-in moment estimation.
ConstraintSet build_corner(const SampleMatrix& data, Index tau,
                           const LinearFunctional& w = {},
                           const MeanMode& mean = UnknownMean{},
                           const std::optional<SymMatrix>& target = {});

/// Positions (row, col) with row - col >= tau maximizing |cov|, largest
/// first, ties broken by lexicographic (row, col). Zero-based.
std::vector<std::pair<Index, Index>> select_top_offband(const SymMatrix& cov,
                                                        Index tau,
                                                        Index top_k);

/// Sparse-adaptive L5 variant. The first floor(split_frac * n) rows pick
/// the top_k off-band positions of the sample covariance; the remaining
/// rows are split in order into halves of N' rows and give pairs whose e
/// component is the band-masked e*' and whose v component sums the
/// selected entries of Y*_i + Y*_{N'+i}.
ConstraintSet build_sparse_adaptive(const SampleMatrix& data, Index tau,
                                    double split_frac = 0.4,
                                    Index top_k = 4);

}  // namespace covel
