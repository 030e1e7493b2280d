#include "covel/elcore.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

namespace covel {

const char* to_string(SolverStatus s) {
  switch (s) {
    case SolverStatus::converged: return "converged";
    case SolverStatus::infeasible_hull: return "infeasible_hull";
    case SolverStatus::max_iterations: return "max_iterations";
  }
  return "?";
}

Standardized standardize(const Eigen::Ref<const Eigen::MatrixX2d>& pairs) {
  Standardized out;
  out.pairs = pairs;
  const double n = double(pairs.rows());
  for (int c = 0; c < 2; ++c) {
    const double rms = std::sqrt(pairs.col(c).squaredNorm() / n);
    if (rms > 0.0 && std::isfinite(rms)) {
      out.scale[c] = rms;
      out.pairs.col(c) /= rms;
    } else {
      out.degenerate[c] = true;
    }
  }
  return out;
}

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Origin strictly inside the convex hull of the rows of z (1 or 2 columns).
bool origin_in_interior(const Eigen::MatrixXd& z) {
  if (z.cols() == 1) {
    return z.minCoeff() < 0.0 && z.maxCoeff() > 0.0;
  }
  std::vector<double> angles;
  angles.reserve(std::size_t(z.rows()));
  for (Index i = 0; i < z.rows(); ++i) {
    if (z(i, 0) != 0.0 || z(i, 1) != 0.0) {
      angles.push_back(std::atan2(z(i, 1), z(i, 0)));
    }
  }
  if (angles.size() < 3) return false;
  std::sort(angles.begin(), angles.end());
  double max_gap = angles.front() + 2.0 * std::numbers::pi - angles.back();
  for (std::size_t k = 1; k < angles.size(); ++k) {
    max_gap = std::max(max_gap, angles[k] - angles[k - 1]);
  }
  return max_gap < std::numbers::pi - 1e-12;
}

double log_sum(const Eigen::VectorXd& t) {
  return t.array().log().sum();
}

}  // namespace

ELSolution solve_dual(const Eigen::Ref<const Eigen::MatrixX2d>& pairs,
                      const SolverOptions& opts) {
  const Index n = pairs.rows();
  if (n < 2) {
    throw Error(ErrorCode::bad_args,
                "empirical likelihood needs at least 2 pairs, got " +
                    std::to_string(n));
  }
  if (!all_finite(pairs)) {
    throw Error(ErrorCode::bad_args, "constraint pairs are not finite");
  }

  ELSolution sol;
  const Standardized st = standardize(pairs);
  const double nd = double(n);

  // Basis of the subspace the pairs actually span.
  const Eigen::Matrix2d gram = st.pairs.transpose() * st.pairs / nd;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> eig(gram);
  const Eigen::Vector2d lambda = eig.eigenvalues();
  Eigen::MatrixXd basis;
  if (!(lambda(1) > 1e-24)) {
    sol.rank = 0;
  } else if (lambda(0) > 1e-12 * lambda(1)) {
    sol.rank = 2;
    basis = Eigen::Matrix2d::Identity();
  } else {
    sol.rank = 1;
    basis = eig.eigenvectors().col(1);
    for (int c = 0; c < 2; ++c)
      if (st.degenerate[c]) basis(c, 0) = 0.0;
  }

  if (sol.rank == 0) {
    if (opts.emit_weights) sol.weights = Eigen::VectorXd::Constant(n, 1.0 / nd);
    return sol;
  }

  const Eigen::MatrixXd z = st.pairs * basis;
  if (!origin_in_interior(z)) {
    sol.status = SolverStatus::infeasible_hull;
    sol.statistic = kInf;
    return sol;
  }

  const Index r = z.cols();
  Eigen::VectorXd rho = Eigen::VectorXd::Zero(r);
  Eigen::VectorXd t = Eigen::VectorXd::Ones(n);
  const double floor = 1.0 / nd;
  bool converged = false;
  int it = 0;
  for (; it <= opts.max_iterations; ++it) {
    const Eigen::VectorXd inv = t.cwiseInverse();
    const Eigen::VectorXd grad = z.transpose() * inv;
    sol.gradient_norm = grad.cwiseAbs().maxCoeff() / nd;
    if (sol.gradient_norm <= opts.gradient_tol) {
      converged = true;
      break;
    }
    if (it == opts.max_iterations) break;
    const Eigen::MatrixXd zw = inv.asDiagonal() * z;
    const Eigen::MatrixXd hess = zw.transpose() * zw;
    const Eigen::VectorXd step = hess.ldlt().solve(grad);

    const double f0 = log_sum(t);
    double alpha = 1.0;
    bool accepted = false;
    while (alpha >= opts.min_step) {
      const Eigen::VectorXd cand = rho + alpha * step;
      Eigen::VectorXd tc = (z * cand).array() + 1.0;
      if (tc.minCoeff() > floor) {
        const double f1 = log_sum(tc);
        if (f1 >= f0 - 1e-14 * (1.0 + std::abs(f0))) {
          rho = cand;
          t = std::move(tc);
          accepted = true;
          break;
        }
      }
      alpha *= 0.5;
    }
    if (!accepted || rho.norm() > opts.max_multiplier) {
      sol.status = SolverStatus::infeasible_hull;
      sol.statistic = kInf;
      sol.iterations = it + 1;
      return sol;
    }
  }

  sol.iterations = it;
  sol.status = converged ? SolverStatus::converged : SolverStatus::max_iterations;
  sol.statistic = std::max(0.0, 2.0 * (z * rho).array().log1p().sum());

  Eigen::Vector2d rho_std = basis * rho;
  for (int c = 0; c < 2; ++c) {
    sol.rho(c) = st.degenerate[c] ? 0.0 : rho_std(c) / st.scale[c];
  }
  if (opts.emit_weights && converged) {
    sol.weights = (nd * t).cwiseInverse();
  }
  return sol;
}

double el_statistic(const Eigen::Ref<const Eigen::MatrixX2d>& pairs) {
  SolverOptions opts;
  opts.emit_weights = false;
  return solve_dual(pairs, opts).statistic;
}

}  // namespace covel
