#pragma once

namespace contam {

// Regularized incomplete beta I_x(a, b), a, b > 0, x in [0, 1].
// Continued fraction (modified Lentz) on whichever side converges.
double regularized_beta(double x, double a, double b);

// Regularized incomplete gamma functions, a > 0, x >= 0.
// Series for x < a + 1, continued fraction otherwise.
double regularized_gamma_p(double a, double x);
double regularized_gamma_q(double a, double x);

// Upper tail P(T > t) of Student's t with `df` degrees of freedom (df > 0).
double t_sf(double t, double df);

// Upper tail P(X > x) of chi-square with `df` degrees of freedom (df > 0).
double chi2_sf(double x, double df);

}  // namespace contam
