#include "covel/chi2.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "covel/errors.hpp"

namespace covel {

namespace {

void check_probability(double beta) {
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw Error(ErrorCode::bad_probability,
                "probability must lie in [0, 1), got " + std::to_string(beta));
  }
}

void check_statistic(double t) {
  if (std::isnan(t) || t < 0.0) {
    throw Error(ErrorCode::negative_statistic,
                "chi-square argument must be >= 0, got " + std::to_string(t));
  }
}

void check_df(int df) {
  if (df < 0 || df > 2) {
    throw Error(ErrorCode::bad_args,
                "supported degrees of freedom are 0, 1, 2; got " +
                    std::to_string(df));
  }
}

}  // namespace

double chi2_quantile_df2(double beta) {
  check_probability(beta);
  if (beta == 0.0) return 0.0;
  return -2.0 * std::log1p(-beta);
}

double chi2_survival_df2(double t) {
  check_statistic(t);
  return std::exp(-t / 2.0);
}

double chi2_survival(double t, int df) {
  check_df(df);
  check_statistic(t);
  switch (df) {
    case 0: return t > 0.0 ? 0.0 : 1.0;
    case 1: return std::erfc(std::sqrt(t / 2.0));
    default: return chi2_survival_df2(t);
  }
}

double chi2_quantile(double beta, int df) {
  check_df(df);
  check_probability(beta);
  if (df == 2) return chi2_quantile_df2(beta);
  if (df == 0 || beta == 0.0) return 0.0;
  // erfc(sqrt(t/2)) = 1 - beta, monotone in t; bisection on s = sqrt(t/2).
  const double target = 1.0 - beta;
  double lo = 0.0, hi = 1.0;
  while (std::erfc(hi) > target) hi *= 2.0;
  for (int i = 0; i < 200 && hi - lo > 0.0; ++i) {
    const double mid = 0.5 * (lo + hi);
    if (mid == lo || mid == hi) break;
    (std::erfc(mid) > target ? lo : hi) = mid;
  }
  const double s = 0.5 * (lo + hi);
  return 2.0 * s * s;
}

double noncentral_chi2_survival(double t, double nu, int df) {
  if (std::isnan(t) || t < 0.0 || std::isnan(nu) || nu < 0.0 ||
      std::isinf(nu) || df < 2 || df % 2 != 0) {
    throw Error(ErrorCode::bad_args,
                "noncentral survival needs t >= 0, finite nu >= 0 and even "
                "df >= 2");
  }
  if (std::isinf(t)) return 0.0;
  if (t == 0.0) return 1.0;

  const double h = t / 2.0;
  const double lambda = nu / 2.0;
  const double log_h = std::log(h);
  const double log_lambda = lambda > 0.0 ? std::log(lambda) : 0.0;

  // Central tail of chi-square(2k): exp(-h) sum_{r<k} h^r / r!
  auto poisson_term = [](double log_rate, double rate, int r) {
    if (r == 0) return std::exp(-rate);
    return std::exp(-rate + r * log_rate - std::lgamma(r + 1.0));
  };

  const int m = df / 2;
  double central = 0.0;
  int next_r = 0;
  auto central_tail = [&](int k) {
    for (; next_r < k; ++next_r) central += poisson_term(log_h, h, next_r);
    return std::min(1.0, central);
  };

  if (lambda == 0.0) return central_tail(m);

  double sum = 0.0;
  double mass = 0.0;
  const double cap = lambda + 60.0 * std::sqrt(lambda) + 200.0;
  for (int j = 0; j < cap; ++j) {
    const double w = poisson_term(log_lambda, lambda, j);
    sum += w * central_tail(m + j);
    mass += w;
    if (j >= lambda && 1.0 - mass < 1e-12) break;
  }
  return std::min(1.0, std::max(0.0, sum));
}

}  // namespace covel
