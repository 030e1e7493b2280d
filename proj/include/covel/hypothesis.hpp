#pragma once

// User-facing test procedures (L1-L5, sparse-adaptive), chi-square
// calibration of the decision and the noncentral power forecaster.

#include "covel/chi2.hpp"
#include "covel/elcore.hpp"

namespace covel {

struct TestOutcome {
  double statistic = 0.0;  // +inf when the hull excludes the origin
  int df = 2;
  double p_value = 1.0;
  bool reject = false;
  double alpha = 0.05;
  Method method = Method::L1;
  ELSolution diagnostics;
};

enum class BandVariant { L3, L4, L5 };

/// Upper-alpha critical value of chi-square(df): the (1-alpha)-quantile,
/// computed as -2 ln(alpha) for df = 2.
double chi2_critical(double alpha, int df = 2);

/// Turns a solved constraint set into a decision at level alpha.
TestOutcome decide(const ELSolution& sol, Method method, double alpha);

/// Solves the constraint set and decides at level alpha.
TestOutcome evaluate(const ConstraintSet& set, double alpha);

/// H0: Sigma = sigma0 via L1 (known mean) or L2 (unknown mean).
TestOutcome test_covariance(const SampleMatrix& data, const SymMatrix& sigma0,
                            const MeanMode& mean, double alpha,
                            const LinearFunctional& w = {});

/// H0: sigma_ij = 0 for |i-j| >= tau. L3 uses a zero mean unless `mean`
/// carries one; L4 and L5 centre each half at its sample mean.
/// `sigma0` only contributes its masked part, which is zero under H0.
TestOutcome test_bandedness(const SampleMatrix& data, Index tau,
                            BandVariant variant, double alpha,
                            const LinearFunctional& w = {},
                            const std::optional<Eigen::VectorXd>& known_mu = {},
                            const std::optional<SymMatrix>& sigma0 = {});

TestOutcome test_sparse_adaptive(const SampleMatrix& data, Index tau,
                                 double alpha, double split_frac = 0.4,
                                 Index top_k = 4);

struct PowerForecast {
  double zeta1 = 0.0;
  double zeta2 = 0.0;
  double nu = 0.0;
  double predicted_power = 0.0;
  double pi11 = 0.0;  // plug-in E e^2 (kappa11 for the banded variant)
  double pi22 = 0.0;  // plug-in E v^2 (kappa22)
};

/// Local power of the covariance test:
///   zeta1 = tr((S - S0)^2) / sqrt(pi11), zeta2 = 2 w'(S - S0) w / sqrt(pi22),
///   nu = N (zeta1^2 + zeta2^2), power = P(chi2(2, nu) > critical(alpha)).
/// pi11, pi22 are the second moments of the pairs built at the true Sigma.
PowerForecast power_forecast(const SymMatrix& sigma, const SymMatrix& sigma0,
                             const ConstraintSet& pairs_under_truth, Index N,
                             double alpha, const LinearFunctional& w = {});

/// Same for the L5 bandedness test: tr((S^(tau))^2) and 2 w'S^[tau]w with
/// kappa11, kappa22 taken from L5 pairs built at the true Sigma.
PowerForecast power_forecast_banded(const SymMatrix& sigma, Index tau,
                                    const ConstraintSet& pairs_under_truth,
                                    Index N, double alpha,
                                    const LinearFunctional& w = {});

}  // namespace covel
