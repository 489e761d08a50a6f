#pragma once

#include <utility>
#include <vector>

#include "proxima/basis.hpp"
#include "proxima/ols.hpp"
#include "proxima/types.hpp"

namespace proxima {

// Multiplicative heteroscedasticity: sigma_i^2 = exp(v_i^T alpha) with the
// variance regressors v built from monomial terms (intercept first).
struct VarianceModel {
    std::vector<BasisTerm> terms;
    Eigen::VectorXd alpha;

    double variance_at(const Scenario& x) const;  // exp(v^T alpha)
};

struct FglsFit {
    std::vector<BasisTerm> terms;
    Eigen::VectorXd coefficients;
    VarianceModel variance_model;
    double log_likelihood = 0.0;
    int iterations = 0;
    bool converged = false;
    int n = 0;
    int k = 0;

    double predict(const Scenario& x) const;
};

struct FglsOptions {
    double tol = 1e-6;
    int max_iter = 100;
};

// Iterative ML: OLS start, then alternate the concentrated Newton step for
// alpha with the weighted least-squares step for beta until both stabilize.
FglsFit fit_fgls(const FittingSet& fit_set, const std::vector<BasisTerm>& terms,
                 const std::vector<BasisTerm>& variance_terms, const FglsOptions& options = {});

struct BreuschPaganResult {
    double statistic = 0.0;
    int df = 0;
    double p_value = 1.0;
};

// Classical LM form: regress scaled squared residuals on the variance
// regressors; the statistic is half the explained sum of squares.
BreuschPaganResult breusch_pagan(const Eigen::VectorXd& ols_residuals,
                                 const Eigen::MatrixXd& variance_regressors);

// AIC for the multiplicative model:
// N log(2 pi) + (sum_i v_i^T) alpha + sum_i exp(-v_i^T alpha) eps_i^2 + 2 (K + M)
double aic_fgls(const FglsFit& fit, const FittingSet& fit_set);

// Type I: variance terms chosen greedily (by FGLS-AIC) from the final OLS
// proxy terms of degree <= 2, holding the proxy terms fixed.
std::pair<VarianceModel, FglsFit> select_variance_model_type1(const FittingSet& fit_set,
                                                              const OlsFit& ols_fit, int m_max,
                                                              const FglsOptions& options = {},
                                                              int threads = 1);

}  // namespace proxima
