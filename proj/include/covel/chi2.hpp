#pragma once

// Chi-square tails used for calibration and power forecasting. The
// two-degree-of-freedom law has closed forms; df = 1 (degenerate
// one-constraint reduction) goes through erfc.

namespace covel {

/// beta-quantile of chi-square(2): -2 ln(1 - beta). Requires 0 <= beta < 1.
double chi2_quantile_df2(double beta);

/// P(chi-square(2) > t) = exp(-t/2). Requires t >= 0; t = +inf gives 0.
double chi2_survival_df2(double t);

/// Survival for df in {0, 1, 2}. df = 0 is the point mass at zero.
double chi2_survival(double t, int df);

/// beta-quantile for df in {0, 1, 2}.
double chi2_quantile(double beta, int df);

/// P(noncentral chi-square(df, nu) > t) as the Poisson(nu/2) mixture of
/// central chi-square(df + 2j) tails, truncated once the remaining Poisson
/// mass is below 1e-12. Even df only (the tails then have closed forms).
double noncentral_chi2_survival(double t, double nu, int df = 2);

}  // namespace covel
