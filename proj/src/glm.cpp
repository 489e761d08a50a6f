#include "proxima/glm.hpp"

#include <cmath>
#include <stdexcept>

#include "proxima/linalg.hpp"

namespace proxima {

namespace {

double model_deviance(Family family, const Eigen::VectorXd& y, const Eigen::VectorXd& mu) {
    double d = 0.0;
    for (Eigen::Index i = 0; i < y.size(); ++i) d += unit_deviance(family, y(i), mu(i));
    return d;
}

}  // namespace

double GlmFit::linear_predictor(const Scenario& x) const {
    double v = 0.0;
    for (std::size_t j = 0; j < terms.size(); ++j) v += coefficients(j) * terms[j].evaluate(x);
    return v;
}

double GlmFit::predict(const Scenario& x) const {
    return link_inverse(link, linear_predictor(x));
}

IrlsResult irls_fit(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, Family family, Link link,
                    const GlmOptions& options, const Eigen::VectorXd* mu0) {
    const Eigen::Index n = z.rows();
    if (link == Link::inverse_square && family != Family::inverse_gaussian)
        throw std::invalid_argument("irls: the invsquare link pairs with invgauss only");

    Eigen::VectorXd mu = mu0 ? *mu0 : Eigen::VectorXd(y.array() + 0.1);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (!response_in_support(family, y(i)))
            throw std::invalid_argument("irls: response outside the family support");
        if (!mean_in_domain(family, mu(i)))
            throw std::invalid_argument("irls: initial mean outside the family domain");
    }
    Eigen::VectorXd eta(n);
    for (Eigen::Index i = 0; i < n; ++i) eta(i) = link_eval(link, mu(i));

    IrlsResult result;
    double deviance = model_deviance(family, y, mu);
    Eigen::VectorXd beta;
    bool have_beta = false;

    for (int iter = 1; iter <= options.max_iter; ++iter) {
        Eigen::VectorXd s(n), w(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double gp = link_derivative(link, mu(i));
            s(i) = eta(i) + (y(i) - mu(i)) * gp;
            w(i) = 1.0 / (gp * gp * variance_function(family, mu(i)));
            if (!std::isfinite(s(i)) || !std::isfinite(w(i)) || w(i) <= 0)
                throw std::runtime_error("irls: non-finite iterate");
        }
        const Eigen::VectorXd beta_new = solve_wls(z, s, w).coefficients;

        // Step-halving back toward the previous coefficients when the full
        // step leaves the domain or yields a non-finite deviance.
        double step = 1.0;
        Eigen::VectorXd beta_try, eta_try, mu_try;
        double dev_try = 0.0;
        bool ok = false;
        for (int h = 0; h <= 10; ++h) {
            beta_try = have_beta ? Eigen::VectorXd(beta + step * (beta_new - beta)) : beta_new;
            eta_try = z * beta_try;
            bool domain_ok = true;
            mu_try.resize(n);
            for (Eigen::Index i = 0; i < n && domain_ok; ++i) {
                if (!eta_in_domain(link, eta_try(i))) { domain_ok = false; break; }
                mu_try(i) = link_inverse(link, eta_try(i));
                if (!mean_in_domain(family, mu_try(i))) domain_ok = false;
            }
            if (domain_ok) {
                dev_try = model_deviance(family, y, mu_try);
                if (std::isfinite(dev_try)) { ok = true; break; }
            }
            if (!have_beta) break;  // nothing to halve toward
            step *= 0.5;
        }
        if (!ok) throw std::runtime_error("irls: non-finite iterate (mean left the domain)");

        beta = beta_try;
        have_beta = true;
        eta = eta_try;
        mu = mu_try;
        result.iterations = iter;
        const double change = std::abs(dev_try - deviance) / (std::abs(dev_try) + 0.1);
        deviance = dev_try;
        if (change < options.tol) {
            result.converged = true;
            break;
        }
    }

    result.beta = beta;
    result.mu = mu;
    result.deviance = deviance;
    return result;
}

GlmFit fit_glm(const FittingSet& fit_set, const std::vector<BasisTerm>& terms, Family family,
               Link link, const GlmOptions& options) {
    const int n = static_cast<int>(fit_set.size());
    const int k = static_cast<int>(terms.size());
    if (n <= k) throw std::invalid_argument("fit_glm: need more fitting points than coefficients");

    const Eigen::MatrixXd z = design_matrix(terms, fit_set.points());
    const Eigen::VectorXd y = response_vector(fit_set);
    const IrlsResult core = irls_fit(z, y, family, link, options);

    GlmFit fit;
    fit.terms = terms;
    fit.family = family;
    fit.link = link;
    fit.n = n;
    fit.k = k;
    fit.coefficients = core.beta;
    fit.mu = core.mu;
    fit.y = y;
    fit.deviance = core.deviance;
    fit.iterations = core.iterations;
    fit.converged = core.converged;

    if (dispersion_known(family)) {
        fit.dispersion = 1.0;
    } else {
        double pearson = 0.0;
        for (int i = 0; i < n; ++i) {
            const double r = y(i) - fit.mu(i);
            pearson += r * r / variance_function(family, fit.mu(i));
        }
        fit.dispersion = pearson / (n - k);
    }
    return fit;
}

Eigen::VectorXd pearson_residuals(const GlmFit& fit, const FittingSet& fit_set) {
    const Eigen::VectorXd y = response_vector(fit_set);
    Eigen::VectorXd r(y.size());
    for (Eigen::Index i = 0; i < y.size(); ++i)
        r(i) = (y(i) - fit.mu(i)) / std::sqrt(variance_function(fit.family, fit.mu(i)));
    return r;
}

double aic_glm(const GlmFit& fit) {
    if (fit.dispersion <= 0) throw std::invalid_argument("aic_glm: dispersion must be positive");
    const int p = extra_parameter_count(fit.family);
    // The likelihood is evaluated at the ML dispersion estimate, deviance / N
    // (exact for gaussian, the usual estimate for gamma and inverse
    // gaussian); this keeps the gaussian-identity case equal to the OLS AIC.
    const double phi = dispersion_known(fit.family) ? 1.0 : fit.deviance / fit.n;
    const double ll = log_likelihood(fit.family, fit.y, fit.mu, phi);
    return -2.0 * ll + 2.0 * (fit.k + p);
}

}  // namespace proxima
