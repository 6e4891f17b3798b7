#pragma once

namespace burnout::stats {

// Regularized incomplete beta I_x(a, b), continued-fraction evaluation.
double incomplete_beta(double a, double b, double x);

// Regularized lower incomplete gamma P(a, x) and its complement Q(a, x).
double incomplete_gamma_p(double a, double x);
double incomplete_gamma_q(double a, double x);

double student_t_cdf(double t, double df);

// P(|T| >= |t|) for T ~ Student t with df degrees of freedom.
double student_t_two_sided_p(double t, double df);

// Upper tail of the chi-square distribution with k degrees of freedom.
double chi_square_sf(double x, double k);

}  // namespace burnout::stats
