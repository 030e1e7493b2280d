#pragma once

// Dense symmetric-matrix kernels, sample splitting and the band / corner
// index masks. Everything here is header-only and works on any Eigen
// expression with a real scalar type.

#include <Eigen/Dense>

#include <cmath>
#include <cstdint>
#include <string>

#include "covel/errors.hpp"

namespace covel {

using Index = Eigen::Index;

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// n x p observations, one row per i.i.d. vector.
using SampleMatrix = Matrix<double>;
/// p x p symmetric matrix stored dense.
using SymMatrix = Matrix<double>;

inline std::string dims_string(Index rows, Index cols) {
  return std::to_string(rows) + "x" + std::to_string(cols);
}

template <typename Derived>
void require_square(const Eigen::MatrixBase<Derived>& a, Index dim,
                    const char* name) {
  if (a.rows() != dim || a.cols() != dim) {
    throw Error(ErrorCode::dimension_mismatch,
                std::string(name) + " is " + dims_string(a.rows(), a.cols()) +
                    ", expected " + dims_string(dim, dim));
  }
}

template <typename Derived>
bool all_finite(const Eigen::MatrixBase<Derived>& a) {
  return a.derived().array().isFinite().all();
}

/// Throws unless `a` is square, finite and symmetric within `tol`
/// (relative to its largest entry).
template <typename Derived>
void require_symmetric(const Eigen::MatrixBase<Derived>& a, const char* name,
                       double tol = 1e-12) {
  if (a.rows() != a.cols()) {
    throw Error(ErrorCode::dimension_mismatch,
                std::string(name) + " is not square (" +
                    dims_string(a.rows(), a.cols()) + ")");
  }
  if (!all_finite(a)) {
    throw Error(ErrorCode::bad_args,
                std::string(name) + " has non-finite entries");
  }
  const double scale = std::max(1.0, double(a.cwiseAbs().maxCoeff()));
  if ((a - a.transpose()).cwiseAbs().maxCoeff() > tol * scale) {
    throw Error(ErrorCode::bad_args, std::string(name) + " is not symmetric");
  }
}

// ---------------------------------------------------------------------------
// Masks
// ---------------------------------------------------------------------------

enum class MaskKind { band, corner };

/// Index-set descriptor for M^(tau) (band: |i-j| >= tau) or M^[tau]
/// (corner: i <= (p-tau)/2 and j > (p+tau)/2, plus the transpose).
/// Never materialized; `for_each` generates the selected pairs.
///
/// Indices handed to callers are zero-based; the defining inequalities
/// are evaluated on one-based indices, in exact integer arithmetic
/// (2i <= p - tau, 2j > p + tau).
struct BandMask {
  Index dim = 0;
  Index tau = 1;
  MaskKind kind = MaskKind::band;

  static BandMask band(Index dim, Index tau) {
    return checked(dim, tau, MaskKind::band);
  }
  static BandMask corner(Index dim, Index tau) {
    return checked(dim, tau, MaskKind::corner);
  }

  /// Rows 0..corner_low()-1 form the corner set A.
  Index corner_low() const {
    const Index twice = dim - tau;
    return twice > 0 ? twice / 2 : 0;
  }
  /// Rows corner_high()..dim-1 form the corner set B.
  Index corner_high() const {
    // smallest one-based j with 2j > p + tau, converted to zero-based
    const Index j1 = (dim + tau) / 2 + 1;
    return std::min(dim, std::max<Index>(j1 - 1, 0));
  }

  bool selects(Index i, Index j) const {
    if (kind == MaskKind::band) {
      return (i > j ? i - j : j - i) >= tau;
    }
    const Index lo = corner_low(), hi = corner_high();
    return (i < lo && j >= hi) || (j < lo && i >= hi);
  }

  bool empty() const {
    if (kind == MaskKind::band) return tau >= dim;
    return corner_low() == 0 || corner_high() >= dim;
  }

  /// Number of selected (i, j) pairs.
  std::int64_t count() const {
    if (kind == MaskKind::band) {
      if (tau >= dim) return 0;
      const std::int64_t m = dim - tau;
      return m * (m + 1);
    }
    return 2 * std::int64_t(corner_low()) * std::int64_t(dim - corner_high());
  }

  template <typename F>
  void for_each(F&& f) const {
    if (kind == MaskKind::band) {
      for (Index i = 0; i < dim; ++i) {
        for (Index j = 0; j + tau <= i; ++j) f(i, j);
        for (Index j = i + tau; j < dim; ++j) f(i, j);
      }
      return;
    }
    const Index lo = corner_low(), hi = corner_high();
    for (Index i = 0; i < lo; ++i)
      for (Index j = hi; j < dim; ++j) f(i, j);
    for (Index i = hi; i < dim; ++i)
      for (Index j = 0; j < lo; ++j) f(i, j);
  }

 private:
  static BandMask checked(Index dim, Index tau, MaskKind kind) {
    if (dim < 1 || tau < 1) {
      throw Error(ErrorCode::bad_bandwidth,
                  "mask needs dim >= 1 and tau >= 1 (got dim=" +
                      std::to_string(dim) + ", tau=" + std::to_string(tau) +
                      ")");
    }
    return BandMask{dim, tau, kind};
  }
};

template <typename Derived>
void require_mask_dims(const Eigen::MatrixBase<Derived>& a, const BandMask& m,
                       const char* name) {
  require_square(a, m.dim, name);
}

/// Materialized copy of `a` with every unselected entry zeroed.
template <typename Derived>
Matrix<typename Derived::Scalar> apply_mask(const Eigen::MatrixBase<Derived>& a,
                                            const BandMask& m) {
  require_mask_dims(a, m, "matrix");
  Matrix<typename Derived::Scalar> out =
      Matrix<typename Derived::Scalar>::Zero(m.dim, m.dim);
  m.for_each([&](Index i, Index j) { out(i, j) = a(i, j); });
  return out;
}

// ---------------------------------------------------------------------------
// Trace products
// ---------------------------------------------------------------------------

/// tr(a b) for symmetric a, b: the Frobenius inner product sum a_kl b_kl.
template <typename DA, typename DB>
typename DA::Scalar trace_product_sym(const Eigen::MatrixBase<DA>& a,
                                      const Eigen::MatrixBase<DB>& b) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::dimension_mismatch,
                "trace product of " + dims_string(a.rows(), a.cols()) +
                    " and " + dims_string(b.rows(), b.cols()));
  }
  return a.cwiseProduct(b).sum();
}

/// Sum over mask-selected (k, l) of a_kl b_kl.
template <typename DA, typename DB>
typename DA::Scalar masked_trace_product(const Eigen::MatrixBase<DA>& a,
                                         const Eigen::MatrixBase<DB>& b,
                                         const BandMask& m) {
  require_mask_dims(a, m, "left operand");
  require_mask_dims(b, m, "right operand");
  typename DA::Scalar s(0);
  m.for_each([&](Index i, Index j) { s += a(i, j) * b(i, j); });
  return s;
}

/// 1' a^(m) 1: sum of the mask-selected entries of `a`.
template <typename Derived>
typename Derived::Scalar masked_grand_sum(const Eigen::MatrixBase<Derived>& a,
                                          const BandMask& m) {
  require_mask_dims(a, m, "matrix");
  typename Derived::Scalar s(0);
  m.for_each([&](Index i, Index j) { s += a(i, j); });
  return s;
}

/// sum over selected (k, l) of x_k y_l, in O(p) for both mask kinds.
/// Equals x' M y where M is the 0/1 indicator matrix of the mask.
template <typename DX, typename DY>
typename DX::Scalar masked_bilinear_rank1(const Eigen::MatrixBase<DX>& x,
                                          const Eigen::MatrixBase<DY>& y,
                                          const BandMask& m) {
  using Scalar = typename DX::Scalar;
  const Index p = m.dim;
  if (x.size() != p || y.size() != p) {
    throw Error(ErrorCode::dimension_mismatch,
                "vector length does not match mask dimension " +
                    std::to_string(p));
  }
  if (m.kind == MaskKind::corner) {
    const Index lo = m.corner_low(), hi = m.corner_high();
    if (lo == 0 || hi >= p) return Scalar(0);
    return x.head(lo).sum() * y.tail(p - hi).sum() +
           x.tail(p - hi).sum() * y.head(lo).sum();
  }
  if (m.tau >= p) return Scalar(0);
  // Full double sum minus the near-band part |k-l| < tau, the latter via
  // prefix sums of y.
  Vector<Scalar> prefix(p + 1);
  prefix(0) = Scalar(0);
  for (Index l = 0; l < p; ++l) prefix(l + 1) = prefix(l) + y(l);
  Scalar near(0);
  for (Index k = 0; k < p; ++k) {
    const Index lo = std::max<Index>(0, k - m.tau + 1);
    const Index hi = std::min<Index>(p, k + m.tau);
    near += x(k) * (prefix(hi) - prefix(lo));
  }
  return x.sum() * prefix(p) - near;
}

// ---------------------------------------------------------------------------
// Sample splitting
// ---------------------------------------------------------------------------

/// Rows 1..N and N+1..2N of a sample, N = floor(n/2). With odd n the
/// last observation is not used.
class SplitView {
 public:
  explicit SplitView(const SampleMatrix& data)
      : data_(&data), half_(data.rows() / 2) {}

  Index half() const { return half_; }
  auto first() const { return data_->topRows(half_); }
  auto second() const { return data_->middleRows(half_, half_); }

 private:
  const SampleMatrix* data_;
  Index half_;
};

/// Splits `data` into paired halves; requires n >= 4 and finite entries.
/// The returned view borrows `data`.
inline SplitView pair_split(const SampleMatrix& data) {
  if (data.rows() < 4) {
    throw Error(ErrorCode::too_few_observations,
                "need at least 4 observations, got " +
                    std::to_string(data.rows()));
  }
  if (!all_finite(data)) {
    throw Error(ErrorCode::bad_args, "sample has non-finite entries");
  }
  return SplitView(data);
}

}  // namespace covel
