#pragma once

// Empirical-likelihood inner optimization for two-component estimating
// equations: -2 log L via the Lagrange dual, with convex-hull feasibility
// detection and reduction to the spanned subspace for degenerate sets.

#include <array>
#include <limits>
#include <optional>

#include "covel/equations.hpp"

namespace covel {

enum class SolverStatus { converged, infeasible_hull, max_iterations };

const char* to_string(SolverStatus s);

struct SolverOptions {
  double gradient_tol = 1e-10;  // infinity norm, standardized scale
  int max_iterations = 100;
  double min_step = 1e-14;
  double max_multiplier = 1e6;
  bool emit_weights = true;
};

struct ELSolution {
  Eigen::Vector2d rho = Eigen::Vector2d::Zero();  // in raw coordinates
  double statistic = 0.0;
  SolverStatus status = SolverStatus::converged;
  int iterations = 0;
  /// Dimension of the span of the pairs actually constrained (2 normally,
  /// 1 or 0 for degenerate sets).
  int rank = 2;
  double gradient_norm = 0.0;
  std::optional<Eigen::VectorXd> weights;

  bool finite() const { return status != SolverStatus::infeasible_hull; }
};

struct Standardized {
  Eigen::MatrixX2d pairs;
  std::array<double, 2> scale{1.0, 1.0};
  std::array<bool, 2> degenerate{false, false};
};

/// Divides each coordinate by its root mean square over i. Identically
/// zero coordinates keep scale 1 and are flagged degenerate.
Standardized standardize(const Eigen::Ref<const Eigen::MatrixX2d>& pairs);

/// Solves (1/N) sum R_i / (1 + rho'R_i) = 0 by damped Newton from rho = 0.
/// Returns statistic +inf with status infeasible_hull when the origin is
/// not in the interior of the convex hull of the pairs.
ELSolution solve_dual(const Eigen::Ref<const Eigen::MatrixX2d>& pairs,
                      const SolverOptions& opts = {});

inline ELSolution solve_dual(const ConstraintSet& set,
                             const SolverOptions& opts = {}) {
  return solve_dual(set.pairs, opts);
}

/// -2 log L of the constraint set (+inf when infeasible).
double el_statistic(const Eigen::Ref<const Eigen::MatrixX2d>& pairs);

inline double el_statistic(const ConstraintSet& set) {
  return el_statistic(set.pairs);
}

}  // namespace covel
