#include "covel/hypothesis.hpp"

#include <cmath>

namespace covel {

namespace {

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) {
    throw Error(ErrorCode::bad_probability,
                "alpha must lie in (0, 1), got " + std::to_string(alpha));
  }
}

}  // namespace

double chi2_critical(double alpha, int df) {
  check_alpha(alpha);
  if (df == 2) return -2.0 * std::log(alpha);
  return chi2_quantile(1.0 - alpha, df);
}

TestOutcome decide(const ELSolution& sol, Method method, double alpha) {
  check_alpha(alpha);
  TestOutcome out;
  out.alpha = alpha;
  out.method = method;
  out.diagnostics = sol;
  out.statistic = sol.statistic;
  if (!sol.finite()) {
    out.df = 2;
    out.p_value = 0.0;
    out.reject = true;
    return out;
  }
  out.df = sol.rank;
  out.p_value = chi2_survival(sol.statistic, out.df);
  out.reject = sol.statistic > chi2_critical(alpha, out.df);
  return out;
}

TestOutcome evaluate(const ConstraintSet& set, double alpha) {
  check_alpha(alpha);
  return decide(solve_dual(set), set.method, alpha);
}

TestOutcome test_covariance(const SampleMatrix& data, const SymMatrix& sigma0,
                            const MeanMode& mean, double alpha,
                            const LinearFunctional& w) {
  check_alpha(alpha);
  if (const auto* known = std::get_if<KnownMean>(&mean)) {
    return evaluate(build_known_mean(data, known->mu, sigma0, w), alpha);
  }
  return evaluate(build_unknown_mean(data, sigma0, w), alpha);
}

TestOutcome test_bandedness(const SampleMatrix& data, Index tau,
                            BandVariant variant, double alpha,
                            const LinearFunctional& w,
                            const std::optional<Eigen::VectorXd>& known_mu,
                            const std::optional<SymMatrix>& sigma0) {
  check_alpha(alpha);
  switch (variant) {
    case BandVariant::L3: {
      const Eigen::VectorXd mu =
          known_mu ? *known_mu : Eigen::VectorXd::Zero(data.cols());
      return evaluate(build_banded(data, tau, KnownMean{mu}, w, sigma0), alpha);
    }
    case BandVariant::L4:
      return evaluate(build_banded(data, tau, UnknownMean{}, w, sigma0), alpha);
    case BandVariant::L5:
      return evaluate(build_corner(data, tau, w, UnknownMean{}, sigma0), alpha);
  }
  throw Error(ErrorCode::bad_args, "unknown bandedness variant");
}

TestOutcome test_sparse_adaptive(const SampleMatrix& data, Index tau,
                                 double alpha, double split_frac,
                                 Index top_k) {
  check_alpha(alpha);
  return evaluate(build_sparse_adaptive(data, tau, split_frac, top_k), alpha);
}

namespace {

PowerForecast finish_forecast(double distance1, double distance2,
                              const ConstraintSet& pairs, Index N,
                              double alpha) {
  check_alpha(alpha);
  if (N < 1) throw Error(ErrorCode::bad_args, "N must be positive");
  if (pairs.size() < 1) {
    throw Error(ErrorCode::degenerate_moments, "no pairs for moment estimates");
  }
  PowerForecast f;
  f.pi11 = pairs.e().squaredNorm() / double(pairs.size());
  f.pi22 = pairs.v().squaredNorm() / double(pairs.size());
  if (!(f.pi11 > 0.0) || !(f.pi22 > 0.0)) {
    throw Error(ErrorCode::degenerate_moments,
                "second-moment estimates must be positive (pi11=" +
                    std::to_string(f.pi11) + ", pi22=" + std::to_string(f.pi22) +
                    ")");
  }
  f.zeta1 = distance1 / std::sqrt(f.pi11);
  f.zeta2 = 2.0 * distance2 / std::sqrt(f.pi22);
  f.nu = double(N) * (f.zeta1 * f.zeta1 + f.zeta2 * f.zeta2);
  // With nu = 0 the series is the central tail at the level-alpha critical
  // value, which is alpha by construction; return it without the exp/log
  // round trip.
  f.predicted_power = f.nu == 0.0
                          ? alpha
                          : noncentral_chi2_survival(chi2_critical(alpha), f.nu);
  return f;
}

}  // namespace

PowerForecast power_forecast(const SymMatrix& sigma, const SymMatrix& sigma0,
                             const ConstraintSet& pairs_under_truth, Index N,
                             double alpha, const LinearFunctional& w) {
  require_square(sigma0, sigma.rows(), "sigma0");
  const SymMatrix diff = sigma - sigma0;
  const Eigen::VectorXd weights = w.weights(sigma.rows());
  return finish_forecast(trace_product_sym(diff, diff),
                         weights.dot(diff * weights), pairs_under_truth, N,
                         alpha);
}

PowerForecast power_forecast_banded(const SymMatrix& sigma, Index tau,
                                    const ConstraintSet& pairs_under_truth,
                                    Index N, double alpha,
                                    const LinearFunctional& w) {
  const Index p = sigma.rows();
  if (tau < 1 || tau >= p) {
    throw Error(ErrorCode::bad_bandwidth, "tau outside [1, p)");
  }
  const SymMatrix banded = apply_mask(sigma, BandMask::band(p, tau));
  const SymMatrix corner = apply_mask(sigma, BandMask::corner(p, tau));
  const Eigen::VectorXd weights = w.weights(p);
  return finish_forecast(trace_product_sym(banded, banded),
                         weights.dot(corner * weights), pairs_under_truth, N,
                         alpha);
}

}  // namespace covel
