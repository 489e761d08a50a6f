#pragma once

namespace proxima {

// Regularized upper incomplete gamma Q(s, x) = Gamma(s, x) / Gamma(s),
// computed by the series / continued-fraction split.
double regularized_gamma_q(double s, double x);

// Upper-tail probability of a chi-square distribution with df degrees of
// freedom: P(X >= x) = Q(df/2, x/2).
double chi_square_upper_tail(double x, int df);

double softplus(double u);  // log(1 + e^u), overflow-safe

}  // namespace proxima
