#pragma once

#include <vector>

#include "proxima/basis.hpp"
#include "proxima/families.hpp"
#include "proxima/types.hpp"

namespace proxima {

struct GlmFit {
    std::vector<BasisTerm> terms;
    Eigen::VectorXd coefficients;
    Family family = Family::gaussian;
    Link link = Link::identity;
    double dispersion = 1.0;  // Pearson chi^2 / (N - K); 1 for poisson
    double deviance = 0.0;
    Eigen::VectorXd mu;  // fitted means at the fitting points
    Eigen::VectorXd y;   // responses, kept for likelihood evaluation
    int iterations = 0;
    bool converged = false;
    int n = 0;
    int k = 0;

    double predict(const Scenario& x) const;  // g^-1(z^T beta)
    double linear_predictor(const Scenario& x) const;
};

struct GlmOptions {
    double tol = 1e-8;
    int max_iter = 50;
};

// IRLS on an explicit design matrix; the core shared by the GLM and
// generalized MARS fits. mu0 optionally overrides the y + 0.1 start.
struct IrlsResult {
    Eigen::VectorXd beta;
    Eigen::VectorXd mu;
    double deviance = 0.0;
    int iterations = 0;
    bool converged = false;
};

IrlsResult irls_fit(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, Family family, Link link,
                    const GlmOptions& options, const Eigen::VectorXd* mu0 = nullptr);

// IRLS from mu_0 = y + 0.1, iterating the working response and weights and
// solving the weighted least-squares problem each round. Convergence is on
// the relative deviance change. Iterates leaving the family/link domain
// trigger step-halving and, past 10 halvings, an error.
GlmFit fit_glm(const FittingSet& fit_set, const std::vector<BasisTerm>& terms, Family family,
               Link link, const GlmOptions& options = {});

// (y_i - mu_i) / sqrt(V(mu_i))
Eigen::VectorXd pearson_residuals(const GlmFit& fit, const FittingSet& fit_set);

// -2 l(beta, phi) + 2 (K + p) with the log-likelihood evaluated at the
// ML-style dispersion (deviance / N); p = 1 when the dispersion is estimated.
double aic_glm(const GlmFit& fit);

}  // namespace proxima
