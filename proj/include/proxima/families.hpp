#pragma once

#include <Eigen/Dense>
#include <string>

namespace proxima {

// Random components of the exponential family used here. Poisson carries a
// known dispersion of 1; the others estimate it.
enum class Family { gaussian, gamma, inverse_gaussian, poisson };

enum class Link { identity, log, inverse, inverse_square, sqrt };

Family parse_family(const std::string& name);
Link parse_link(const std::string& name);
std::string family_name(Family f);
std::string link_name(Link l);

// Variance function V(mu): gaussian 1, gamma mu^2, inverse gaussian mu^3,
// poisson mu.
double variance_function(Family f, double mu);

// True when mu lies in the family's mean domain (and y in its support).
bool mean_in_domain(Family f, double mu);
bool response_in_support(Family f, double y);

double link_eval(Link l, double mu);        // eta = g(mu)
double link_inverse(Link l, double eta);    // mu = g^-1(eta); throws outside domain
double link_derivative(Link l, double mu);  // g'(mu)
bool eta_in_domain(Link l, double eta);

// Unit deviance d(y, mu); model deviance is the sum over observations.
double unit_deviance(Family f, double y, double mu);

// Full log-likelihood including normalizing terms, evaluated at dispersion
// phi (ignored for poisson).
double log_likelihood(Family f, const Eigen::VectorXd& y, const Eigen::VectorXd& mu, double phi);

bool dispersion_known(Family f);
int extra_parameter_count(Family f);  // p in the AIC penalty

}  // namespace proxima
