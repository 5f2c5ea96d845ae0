#pragma once

namespace appealgate::stats {

// Regularized lower incomplete gamma P(a, x); series for x < a+1, continued
// fraction for the complement otherwise.
double regularized_gamma_p(double a, double x);

// Regularized upper incomplete gamma Q(a, x) = 1 - P(a, x).
double regularized_gamma_q(double a, double x);

// Regularized incomplete beta I_x(a, b) via the Lentz continued fraction.
double regularized_beta(double x, double a, double b);

double erf(double x);
double erfc(double x);

// Survival function of the chi-squared distribution.
double chi2_sf(double statistic, int df);

// Two-sided p for Student's t with df degrees of freedom.
double student_t_sf_twosided(double t, double df);

// Standard normal two-sided p for a Wald z statistic.
double normal_sf_twosided(double z);

} // namespace appealgate::stats
