#include "proxima/fgls.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <utility>

#include "proxima/linalg.hpp"
#include "proxima/parallel.hpp"
#include "proxima/special.hpp"

namespace proxima {

namespace {

// 2x the negative concentrated log-likelihood of alpha given residuals,
// dropping constants: sum_i [ v_i^T a + exp(-v_i^T a) eps_i^2 ].
double alpha_objective(const Eigen::MatrixXd& v, const Eigen::VectorXd& eps2,
                       const Eigen::VectorXd& alpha) {
    const Eigen::VectorXd va = v * alpha;
    double f = 0.0;
    for (Eigen::Index i = 0; i < va.size(); ++i) f += va(i) + std::exp(-va(i)) * eps2(i);
    return f;
}

// Newton minimization of the convex alpha objective, with backtracking.
Eigen::VectorXd solve_alpha(const Eigen::MatrixXd& v, const Eigen::VectorXd& eps2,
                            Eigen::VectorXd alpha) {
    const Eigen::Index m = v.cols();
    double f = alpha_objective(v, eps2, alpha);
    for (int iter = 0; iter < 100; ++iter) {
        const Eigen::VectorXd va = v * alpha;
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(m);
        Eigen::MatrixXd hess = Eigen::MatrixXd::Zero(m, m);
        for (Eigen::Index i = 0; i < va.size(); ++i) {
            const double e = std::exp(-va(i)) * eps2(i);
            grad += v.row(i).transpose() * (1.0 - e);
            hess += v.row(i).transpose() * v.row(i) * e;
        }
        if (grad.lpNorm<Eigen::Infinity>() <= 1e-10 * std::max<double>(1.0, va.size())) break;

        Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
        Eigen::VectorXd step = ldlt.solve(-grad);
        if (ldlt.info() != Eigen::Success || !step.allFinite())
            step = -grad;  // gradient fallback when the Hessian degenerates

        double scale = 1.0;
        bool improved = false;
        for (int h = 0; h < 50; ++h) {
            const Eigen::VectorXd trial = alpha + scale * step;
            const double ft = alpha_objective(v, eps2, trial);
            if (std::isfinite(ft) && ft < f + 1e-14 * std::abs(f)) {
                alpha = trial;
                f = ft;
                improved = true;
                break;
            }
            scale *= 0.5;
        }
        if (!improved)
            throw std::runtime_error("fit_fgls: inner Newton diverged after 50 backtracked steps");
        if ((scale * step).lpNorm<Eigen::Infinity>() < 1e-12) break;
    }
    return alpha;
}

double relative_change(const Eigen::VectorXd& now, const Eigen::VectorXd& before) {
    return (now - before).lpNorm<Eigen::Infinity>() /
           (before.lpNorm<Eigen::Infinity>() + 1e-12);
}

}  // namespace

double VarianceModel::variance_at(const Scenario& x) const {
    double va = 0.0;
    for (std::size_t m = 0; m < terms.size(); ++m) va += alpha(m) * terms[m].evaluate(x);
    return std::exp(va);
}

double FglsFit::predict(const Scenario& x) const {
    double v = 0.0;
    for (std::size_t j = 0; j < terms.size(); ++j) v += coefficients(j) * terms[j].evaluate(x);
    return v;
}

FglsFit fit_fgls(const FittingSet& fit_set, const std::vector<BasisTerm>& terms,
                 const std::vector<BasisTerm>& variance_terms, const FglsOptions& options) {
    const int n = static_cast<int>(fit_set.size());
    const int k = static_cast<int>(terms.size());
    const int m = static_cast<int>(variance_terms.size());
    if (m < 1 || !variance_terms.front().is_intercept())
        throw std::invalid_argument("fit_fgls: variance terms must begin with the intercept");
    if (n < k + m)
        throw std::invalid_argument("fit_fgls: need N >= K + M fitting points");

    const Eigen::MatrixXd z = design_matrix(terms, fit_set.points());
    const Eigen::MatrixXd v = design_matrix(variance_terms, fit_set.points());
    const Eigen::VectorXd y = response_vector(fit_set);

    FglsFit fit;
    fit.terms = terms;
    fit.variance_model.terms = variance_terms;
    fit.n = n;
    fit.k = k;

    Eigen::VectorXd beta = solve_ls(z, y).coefficients;
    Eigen::VectorXd alpha;

    for (int iter = 1; iter <= options.max_iter; ++iter) {
        const Eigen::VectorXd eps2 = (y - z * beta).array().square();
        Eigen::VectorXd alpha_start;
        if (iter == 1) {
            alpha_start = Eigen::VectorXd::Zero(m);
            alpha_start(0) = std::log(std::max(eps2.mean(), 1e-300));
        } else {
            alpha_start = alpha;
        }
        const Eigen::VectorXd alpha_new = solve_alpha(v, eps2, alpha_start);

        const Eigen::VectorXd w = (-(v * alpha_new)).array().exp();
        const Eigen::VectorXd beta_new = solve_wls(z, y, w).coefficients;

        const double db = relative_change(beta_new, beta);
        const double da = iter == 1 ? 1.0 : relative_change(alpha_new, alpha);
        beta = beta_new;
        alpha = alpha_new;
        fit.iterations = iter;
        if (std::max(db, da) < options.tol) {
            fit.converged = true;
            break;
        }
    }

    fit.coefficients = beta;
    fit.variance_model.alpha = alpha;
    const Eigen::VectorXd va = v * alpha;
    const Eigen::VectorXd eps = y - z * beta;
    double quad = 0.0;
    for (int i = 0; i < n; ++i) quad += std::exp(-va(i)) * eps(i) * eps(i);
    fit.log_likelihood =
        -0.5 * (n * std::log(2.0 * std::numbers::pi) + va.sum() + quad);
    return fit;
}

BreuschPaganResult breusch_pagan(const Eigen::VectorXd& ols_residuals,
                                 const Eigen::MatrixXd& variance_regressors) {
    const Eigen::Index n = ols_residuals.size();
    const Eigen::Index m = variance_regressors.cols();
    if (m < 2)
        throw std::invalid_argument("breusch_pagan: need an intercept plus >= 1 regressor");
    if (variance_regressors.rows() != n)
        throw std::invalid_argument("breusch_pagan: size mismatch");

    const double sigma2 = ols_residuals.squaredNorm() / n;
    if (sigma2 <= 0) throw std::runtime_error("breusch_pagan: zero residual variance");
    const Eigen::VectorXd g = ols_residuals.array().square() / sigma2;

    const auto sol = solve_ls(variance_regressors, g);
    const Eigen::VectorXd fitted = variance_regressors * sol.coefficients;
    const double g_mean = g.mean();
    const double ess = (fitted.array() - g_mean).square().sum();

    BreuschPaganResult result;
    result.statistic = 0.5 * ess;
    result.df = static_cast<int>(m) - 1;
    result.p_value = chi_square_upper_tail(result.statistic, result.df);
    return result;
}

double aic_fgls(const FglsFit& fit, const FittingSet& fit_set) {
    const int n = fit.n;
    const Eigen::MatrixXd z = design_matrix(fit.terms, fit_set.points());
    const Eigen::MatrixXd v = design_matrix(fit.variance_model.terms, fit_set.points());
    const Eigen::VectorXd y = response_vector(fit_set);
    const Eigen::VectorXd eps = y - z * fit.coefficients;
    const Eigen::VectorXd va = v * fit.variance_model.alpha;
    double acc = n * std::log(2.0 * std::numbers::pi) + va.sum();
    for (int i = 0; i < n; ++i) acc += std::exp(-va(i)) * eps(i) * eps(i);
    return acc + 2.0 * (fit.terms.size() + fit.variance_model.terms.size());
}

std::pair<VarianceModel, FglsFit> select_variance_model_type1(const FittingSet& fit_set,
                                                              const OlsFit& ols_fit, int m_max,
                                                              const FglsOptions& options,
                                                              int threads) {
    if (m_max < 1) throw std::invalid_argument("select_variance_model_type1: m_max must be >= 1");

    std::vector<BasisTerm> pool;
    for (const auto& t : ols_fit.terms)
        if (t.degree() <= 2 && !t.is_intercept()) pool.push_back(t);
    std::sort(pool.begin(), pool.end());

    std::vector<BasisTerm> current{BasisTerm::intercept(fit_set.dimension())};
    FglsFit best_fit = fit_fgls(fit_set, ols_fit.terms, current, options);
    double best_aic = aic_fgls(best_fit, fit_set);

    while (static_cast<int>(current.size()) < m_max && !pool.empty()) {
        struct Candidate {
            bool ok = false;
            double aic = 0.0;
            FglsFit fit;
        };
        std::vector<Candidate> scored(pool.size());
        parallel_for(pool.size(), threads, [&](std::size_t i) {
            std::vector<BasisTerm> trial = current;
            trial.push_back(pool[i]);
            try {
                Candidate c;
                c.fit = fit_fgls(fit_set, ols_fit.terms, trial, options);
                c.aic = aic_fgls(c.fit, fit_set);
                c.ok = std::isfinite(c.aic);
                scored[i] = std::move(c);
            } catch (const std::exception&) {
                // candidate dropped
            }
        });

        int pick = -1;
        for (std::size_t i = 0; i < scored.size(); ++i) {
            if (!scored[i].ok) continue;
            if (scored[i].aic < best_aic && (pick < 0 || scored[i].aic < scored[pick].aic))
                pick = static_cast<int>(i);
        }
        if (pick < 0) break;

        current.push_back(pool[pick]);
        best_aic = scored[pick].aic;
        best_fit = std::move(scored[pick].fit);
        pool.erase(pool.begin() + pick);
    }
    return {best_fit.variance_model, best_fit};
}

}  // namespace proxima
