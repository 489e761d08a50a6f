#include "proxima/special.hpp"

#include <cmath>
#include <stdexcept>

namespace proxima {

namespace {

// Lower regularized gamma P(s,x) by its power series, for x < s + 1.
double gamma_p_series(double s, double x) {
    double term = 1.0 / s;
    double sum = term;
    double a = s;
    for (int k = 0; k < 500; ++k) {
        a += 1.0;
        term *= x / a;
        sum += term;
        if (std::abs(term) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

// Upper regularized gamma Q(s,x) by the Lentz continued fraction, x >= s + 1.
double gamma_q_cf(double s, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - s;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - s);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::abs(delta - 1.0) < 1e-16) break;
    }
    return h * std::exp(-x + s * std::log(x) - std::lgamma(s));
}

}  // namespace

double regularized_gamma_q(double s, double x) {
    if (s <= 0 || x < 0) throw std::invalid_argument("regularized_gamma_q: bad arguments");
    if (x == 0) return 1.0;
    if (x < s + 1.0) return 1.0 - gamma_p_series(s, x);
    return gamma_q_cf(s, x);
}

double chi_square_upper_tail(double x, int df) {
    if (df < 1) throw std::invalid_argument("chi_square_upper_tail: df must be >= 1");
    if (x <= 0) return 1.0;
    return regularized_gamma_q(0.5 * df, 0.5 * x);
}

double softplus(double u) {
    if (u > 35.0) return u;
    if (u < -35.0) return std::exp(u);
    return std::log1p(std::exp(u));
}

}  // namespace proxima
