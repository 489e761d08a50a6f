#include "proxima/gam.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "proxima/linalg.hpp"

namespace proxima {

namespace {

// The four nonzero uniform cubic B-splines on one knot interval, in the
// local coordinate w in [0,1]; out[0..3] belong to basis indices l-3..l.
void uniform_cubic(double w, double out[4]) {
    const double w2 = w * w, w3 = w2 * w;
    out[0] = (1.0 - 3.0 * w + 3.0 * w2 - w3) / 6.0;
    out[1] = (4.0 - 6.0 * w2 + 3.0 * w3) / 6.0;
    out[2] = (1.0 + 3.0 * w + 3.0 * w2 - 3.0 * w3) / 6.0;
    out[3] = w3 / 6.0;
}

void uniform_cubic_derivative(double w, double h, double out[4]) {
    const double w2 = w * w;
    out[0] = (-3.0 + 6.0 * w - 3.0 * w2) / (6.0 * h);
    out[1] = (-12.0 * w + 9.0 * w2) / (6.0 * h);
    out[2] = (3.0 + 6.0 * w - 9.0 * w2) / (6.0 * h);
    out[3] = (3.0 * w2) / (6.0 * h);
}

void add_active(Eigen::VectorXd& b, int l, const double v[4]) {
    for (int i = 0; i < 4; ++i) b(l - 3 + i) += v[i];
}

}  // namespace

Eigen::VectorXd bspline_values(const SmoothSpec& spec, double z) {
    const int j = spec.spline_count;
    const double h = (spec.z_max - spec.z_min) / (j - 3);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(j);
    double v[4], d[4];

    if (z < spec.z_min) {
        uniform_cubic(0.0, v);
        uniform_cubic_derivative(0.0, h, d);
        for (int i = 0; i < 4; ++i) b(i) = v[i] + d[i] * (z - spec.z_min);
        return b;
    }
    if (z > spec.z_max) {
        uniform_cubic(1.0, v);
        uniform_cubic_derivative(1.0, h, d);
        for (int i = 0; i < 4; ++i) b(j - 4 + i) = v[i] + d[i] * (z - spec.z_max);
        return b;
    }
    // interval index: t_l <= z < t_{l+1} with t_3 = z_min, t_J = z_max
    int l = 3 + static_cast<int>(std::floor((z - spec.z_min) / h));
    l = std::min(std::max(l, 3), j - 1);
    const double w = (z - (spec.z_min + (l - 3) * h)) / h;
    uniform_cubic(w, v);
    add_active(b, l, v);
    return b;
}

BsplineColumns bspline_columns(const Eigen::VectorXd& z, const SmoothSpec& spec) {
    if (spec.spline_count < 4)
        throw std::invalid_argument("bspline_columns: need at least 4 splines per smooth");
    if (!(spec.z_max > spec.z_min))
        throw std::runtime_error("bspline_columns: degenerate smooth argument (constant z)");

    BsplineColumns out;
    out.columns.resize(z.size(), spec.spline_count);
    for (Eigen::Index i = 0; i < z.size(); ++i) out.columns.row(i) = bspline_values(spec, z(i));
    out.means = out.columns.colwise().mean();
    out.columns.rowwise() -= out.means.transpose();
    return out;
}

double GamFit::linear_predictor(const Scenario& x) const {
    double eta = intercept;
    for (const auto& s : smooths) {
        const double z = s.spec.term.evaluate(x);
        const Eigen::VectorXd b = bspline_values(s.spec, z);
        for (Eigen::Index j = 0; j < s.coefficients.size(); ++j)
            eta += s.coefficients(j) * (b(j) - s.means(j));
    }
    return eta;
}

double GamFit::predict(const Scenario& x) const {
    return link_inverse(link, linear_predictor(x));
}

GamFit fit_gam(const FittingSet& fit_set, const std::vector<BasisTerm>& smooth_terms,
               Family family, Link link, const std::vector<double>& lambdas,
               const GamOptions& options) {
    const int n = static_cast<int>(fit_set.size());
    const int j = options.spline_count;
    const std::size_t m = smooth_terms.size();
    if (lambdas.size() != m)
        throw std::invalid_argument("fit_gam: one lambda per smooth required");
    if (j < 4) throw std::invalid_argument("fit_gam: spline count must be >= 4");

    // Assemble the design once: intercept column, then per smooth the
    // centered B-spline columns with the last (redundant) column dropped.
    const int cols = 1 + static_cast<int>(m) * (j - 1);
    Eigen::MatrixXd z_design = Eigen::MatrixXd::Zero(n, cols);
    z_design.col(0).setOnes();

    GamFit fit;
    fit.family = family;
    fit.link = link;
    fit.n = n;
    fit.columns = cols;
    fit.smooths.resize(m);

    for (std::size_t k = 0; k < m; ++k) {
        Eigen::VectorXd zk(n);
        for (int i = 0; i < n; ++i) zk(i) = smooth_terms[k].evaluate(fit_set.scenario(i));
        SmoothSpec spec;
        spec.term = smooth_terms[k];
        spec.spline_count = j;
        spec.z_min = zk.minCoeff();
        spec.z_max = zk.maxCoeff();
        spec.lambda = lambdas[k];
        if (spec.lambda < 0) throw std::invalid_argument("fit_gam: lambda must be >= 0");
        const auto bs = bspline_columns(zk, spec);
        z_design.block(0, 1 + static_cast<int>(k) * (j - 1), n, j - 1) =
            bs.columns.leftCols(j - 1);
        fit.smooths[k].spec = spec;
        fit.smooths[k].means = bs.means;
    }

    // sqrt-penalty rows: sqrt(lambda) times the second-difference matrix,
    // truncated to the kept columns.
    const int pen_rows = static_cast<int>(m) * (j - 2);
    Eigen::MatrixXd penalty = Eigen::MatrixXd::Zero(pen_rows, cols);
    for (std::size_t k = 0; k < m; ++k) {
        const double s = std::sqrt(fit.smooths[k].spec.lambda);
        const int r0 = static_cast<int>(k) * (j - 2);
        const int c0 = 1 + static_cast<int>(k) * (j - 1);
        for (int r = 0; r < j - 2; ++r)
            for (int c = 0; c < 3; ++c)
                if (r + c < j - 1)
                    penalty(r0 + r, c0 + r + c) = s * (c == 1 ? -2.0 : 1.0);
    }

    const Eigen::VectorXd y = response_vector(fit_set);
    Eigen::VectorXd mu = y.array() + 0.1;
    for (int i = 0; i < n; ++i) {
        if (!response_in_support(family, y(i)))
            throw std::invalid_argument("fit_gam: response outside the family support");
        if (!mean_in_domain(family, mu(i)))
            throw std::invalid_argument("fit_gam: initial mean outside the family domain");
    }
    Eigen::VectorXd eta(n);
    for (int i = 0; i < n; ++i) eta(i) = link_eval(link, mu(i));

    auto deviance_of = [&](const Eigen::VectorXd& means) {
        double d = 0.0;
        for (int i = 0; i < n; ++i) d += unit_deviance(family, y(i), means(i));
        return d;
    };

    Eigen::MatrixXd aug(n + pen_rows, cols);
    Eigen::VectorXd aug_rhs = Eigen::VectorXd::Zero(n + pen_rows);
    aug.bottomRows(pen_rows) = penalty;

    Eigen::VectorXd beta = Eigen::VectorXd::Zero(cols);
    Eigen::VectorXd w(n);
    bool have_beta = false;
    double pdev = deviance_of(mu);

    for (int iter = 1; iter <= options.max_iter; ++iter) {
        for (int i = 0; i < n; ++i) {
            const double gp = link_derivative(link, mu(i));
            const double s = eta(i) + (y(i) - mu(i)) * gp;
            w(i) = 1.0 / (gp * gp * variance_function(family, mu(i)));
            if (!std::isfinite(s) || !std::isfinite(w(i)) || w(i) <= 0)
                throw std::runtime_error("fit_gam: non-finite PIRLS iterate");
            const double sw = std::sqrt(w(i));
            aug.row(i) = sw * z_design.row(i);
            aug_rhs(i) = sw * s;
        }
        Eigen::VectorXd beta_new;
        try {
            beta_new = solve_ls(aug, aug_rhs).coefficients;
        } catch (const std::runtime_error&) {
            throw std::runtime_error("fit_gam: penalized system singular");
        }

        double step = 1.0;
        Eigen::VectorXd beta_try, eta_try, mu_try;
        double pdev_try = 0.0;
        bool ok = false;
        for (int h = 0; h <= 10; ++h) {
            beta_try = have_beta ? Eigen::VectorXd(beta + step * (beta_new - beta)) : beta_new;
            eta_try = z_design * beta_try;
            bool domain_ok = true;
            mu_try.resize(n);
            for (int i = 0; i < n && domain_ok; ++i) {
                if (!eta_in_domain(link, eta_try(i))) { domain_ok = false; break; }
                mu_try(i) = link_inverse(link, eta_try(i));
                if (!mean_in_domain(family, mu_try(i))) domain_ok = false;
            }
            if (domain_ok) {
                pdev_try = deviance_of(mu_try) + (penalty * beta_try).squaredNorm();
                if (std::isfinite(pdev_try)) { ok = true; break; }
            }
            if (!have_beta) break;
            step *= 0.5;
        }
        if (!ok) throw std::runtime_error("fit_gam: non-finite iterate (mean left the domain)");

        beta = beta_try;
        have_beta = true;
        eta = eta_try;
        mu = mu_try;
        fit.iterations = iter;
        const double change = std::abs(pdev_try - pdev) / (std::abs(pdev_try) + 0.1);
        pdev = pdev_try;
        if (change < options.tol) {
            fit.converged = true;
            break;
        }
    }

    fit.intercept = beta(0);
    for (std::size_t k = 0; k < m; ++k)
        fit.smooths[k].coefficients = beta.segment(1 + static_cast<int>(k) * (j - 1), j - 1);
    fit.mu = mu;
    fit.y = y;
    fit.deviance = deviance_of(mu);

    // Effective degrees of freedom at the converged weights.
    const Eigen::MatrixXd a = z_design.transpose() * w.asDiagonal() * z_design;
    const Eigen::MatrixXd s_mat = penalty.transpose() * penalty;
    fit.effective_df = (a + s_mat).ldlt().solve(a).trace();

    if (dispersion_known(family)) {
        fit.dispersion = 1.0;
    } else {
        double pearson = 0.0;
        for (int i = 0; i < n; ++i) {
            const double r = y(i) - mu(i);
            pearson += r * r / variance_function(family, mu(i));
        }
        fit.dispersion = pearson / std::max(1.0, n - fit.effective_df);
    }
    return fit;
}

double effective_df(const GamFit& fit) { return fit.effective_df; }

double gcv_gam(const GamFit& fit) {
    if (fit.effective_df >= fit.n)
        throw std::runtime_error("gcv_gam: effective df >= N");
    const double denom = fit.n - fit.effective_df;
    return fit.n * fit.deviance / (denom * denom);
}

double aic_gam(const GamFit& fit) {
    const int p = extra_parameter_count(fit.family);
    const double phi = dispersion_known(fit.family) ? 1.0 : fit.deviance / fit.n;
    const double ll = log_likelihood(fit.family, fit.y, fit.mu, phi);
    return -2.0 * ll + 2.0 * (fit.effective_df + p);
}

GamCriterion parse_gam_criterion(const std::string& name) {
    if (name == "gcv") return GamCriterion::gcv;
    if (name == "aic") return GamCriterion::aic;
    throw std::invalid_argument("unknown GAM criterion: " + name);
}

std::vector<double> select_lambda(const FittingSet& fit_set,
                                  const std::vector<BasisTerm>& smooth_terms, Family family,
                                  Link link, const std::vector<double>& grid,
                                  GamCriterion criterion, const GamOptions& options) {
    if (grid.empty()) throw std::invalid_argument("select_lambda: empty grid");
    std::vector<double> sorted_grid = grid;
    std::sort(sorted_grid.begin(), sorted_grid.end(), std::greater<double>());

    const double response_scale = std::max(1.0, response_vector(fit_set).squaredNorm());
    auto score = [&](const std::vector<double>& lambdas, double& out) {
        try {
            GamFit f = fit_gam(fit_set, smooth_terms, family, link, lambdas, options);
            if (!f.converged) return false;
            // An essentially exact fit scores as a clean zero so that the
            // grid ties resolve toward the smoothest model instead of
            // rounding noise.
            if (f.deviance <= 1e-20 * response_scale) f.deviance = 0.0;
            out = criterion == GamCriterion::gcv ? gcv_gam(f) : aic_gam(f);
            return std::isfinite(out);
        } catch (const std::exception&) {
            return false;
        }
    };

    // Shared-lambda scan, largest lambda first so that ties keep the
    // smoothest model.
    std::vector<double> best;
    double best_score = 0.0;
    for (double g : sorted_grid) {
        std::vector<double> trial(smooth_terms.size(), g);
        double sc;
        if (!score(trial, sc)) continue;
        if (best.empty() || sc < best_score) {
            best = trial;
            best_score = sc;
        }
    }
    if (best.empty()) throw std::runtime_error("select_lambda: no grid point converged");

    // One coordinate-wise refinement pass.
    for (std::size_t k = 0; k < smooth_terms.size(); ++k) {
        for (double g : sorted_grid) {
            if (g == best[k]) continue;
            std::vector<double> trial = best;
            trial[k] = g;
            double sc;
            if (score(trial, sc) && sc < best_score) {
                best = trial;
                best_score = sc;
            }
        }
    }
    return best;
}

}  // namespace proxima
