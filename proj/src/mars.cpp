#include "proxima/mars.hpp"

#include <algorithm>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "proxima/glm.hpp"
#include "proxima/linalg.hpp"
#include "proxima/parallel.hpp"

namespace proxima {

HingeTerm::HingeTerm(std::vector<HingeFactor> f) : factors(std::move(f)) {
    std::set<int> dims;
    for (const auto& factor : factors)
        if (!dims.insert(factor.dim).second)
            throw std::invalid_argument("HingeTerm: two factors on the same dimension");
}

bool HingeTerm::uses_dim(int d) const {
    for (const auto& f : factors)
        if (f.dim == d) return true;
    return false;
}

double HingeTerm::evaluate(const Scenario& x) const {
    double v = 1.0;
    for (const auto& f : factors) {
        const double u = f.positive ? x[f.dim] - f.knot : f.knot - x[f.dim];
        if (u <= 0.0) return 0.0;
        v *= u;
    }
    return v;
}

std::string HingeTerm::to_string() const {
    if (is_intercept()) return "1";
    std::ostringstream os;
    for (std::size_t i = 0; i < factors.size(); ++i) {
        if (i) os << "*";
        const auto& f = factors[i];
        if (f.positive)
            os << "(x" << f.dim + 1 << "-" << f.knot << ")+";
        else
            os << "(" << f.knot << "-x" << f.dim + 1 << ")+";
    }
    return os.str();
}

double MarsModel::predict(const Scenario& x) const {
    double eta = 0.0;
    for (std::size_t j = 0; j < terms.size(); ++j) eta += coefficients(j) * terms[j].evaluate(x);
    return link_inverse(link, eta);
}

int MarsModel::knot_count() const {
    std::set<std::pair<int, double>> knots;
    for (const auto& t : terms)
        for (const auto& f : t.factors) knots.insert({f.dim, f.knot});
    return static_cast<int>(knots.size());
}

std::vector<MarsCandidatePair> initial_candidates(const FittingSet& fit_set, int knot_cap) {
    const int d = fit_set.dimension();
    const int n = static_cast<int>(fit_set.size());
    std::vector<MarsCandidatePair> pool;
    for (int dim = 0; dim < d; ++dim) {
        std::vector<double> values(n);
        for (int i = 0; i < n; ++i) values[i] = fit_set.scenario(i)[dim];
        std::sort(values.begin(), values.end());
        values.erase(std::unique(values.begin(), values.end()), values.end());
        if (knot_cap > 0 && static_cast<int>(values.size()) > knot_cap) {
            // thin to quantile-spaced representatives
            std::vector<double> kept(knot_cap);
            for (int q = 0; q < knot_cap; ++q) {
                const std::size_t idx =
                    static_cast<std::size_t>(std::llround(q * double(values.size() - 1) /
                                                          (knot_cap - 1)));
                kept[q] = values[idx];
            }
            kept.erase(std::unique(kept.begin(), kept.end()), kept.end());
            values = std::move(kept);
        }
        for (double t : values) pool.push_back({0, dim, t});
    }
    return pool;
}

std::size_t pool_hinge_count(const std::vector<MarsCandidatePair>& pool) {
    return 2 * pool.size();
}

namespace {

Eigen::MatrixXd hinge_design(const std::vector<HingeTerm>& terms, const FittingSet& fit_set) {
    Eigen::MatrixXd z(fit_set.size(), terms.size());
    for (std::size_t i = 0; i < fit_set.size(); ++i)
        for (std::size_t k = 0; k < terms.size(); ++k)
            z(i, k) = terms[k].evaluate(fit_set.scenario(i));
    return z;
}

struct TermFit {
    Eigen::VectorXd beta;
    Eigen::VectorXd mu;
    double criterion = 0.0;  // RSS, or deviance for generalized models
};

bool classical(const MarsOptions& o) {
    return o.family == Family::gaussian && o.link == Link::identity;
}

// Fits the given columns; returns false on rank deficiency or divergence.
bool fit_columns(const Eigen::MatrixXd& z, const Eigen::VectorXd& y, const MarsOptions& o,
                 const Eigen::VectorXd* warm_mu, TermFit& out) {
    try {
        if (classical(o)) {
            const auto sol = solve_ls(z, y);
            out.beta = sol.coefficients;
            out.mu = z * sol.coefficients;
            out.criterion = sol.rss;
        } else {
            GlmOptions go;
            go.max_iter = 25;
            const IrlsResult r = irls_fit(z, y, o.family, o.link, go, warm_mu);
            out.beta = r.beta;
            out.mu = r.mu;
            out.criterion = r.deviance;
        }
        return std::isfinite(out.criterion);
    } catch (const std::exception&) {
        return false;
    }
}

}  // namespace

MarsForwardResult forward_pass(const FittingSet& fit_set, const MarsOptions& options) {
    if (options.k_max < 3) throw std::invalid_argument("forward_pass: k_max must be >= 3");
    if (options.t_min < 0) throw std::invalid_argument("forward_pass: t_min must be >= 0");

    const Eigen::VectorXd y = response_vector(fit_set);
    const int n = static_cast<int>(fit_set.size());

    MarsForwardResult result;
    MarsModel& model = result.model;
    model.family = options.family;
    model.link = options.link;
    model.n = n;
    model.terms = {HingeTerm{}};

    Eigen::MatrixXd design = hinge_design(model.terms, fit_set);
    TermFit current;
    if (!fit_columns(design, y, options, nullptr, current))
        throw std::runtime_error("forward_pass: intercept-only fit failed");
    result.rss_trace.push_back(current.criterion);

    // Base knot table for pool extensions.
    std::vector<MarsCandidatePair> base = initial_candidates(fit_set, options.knot_cap);
    std::vector<MarsCandidatePair> pool = base;

    const double y_scale = std::max(1.0, y.squaredNorm());
    while (static_cast<int>(model.terms.size()) + 2 <= options.k_max) {
        if (current.criterion <= 1e-24 * y_scale) break;  // saturated
        result.pool_trace.push_back(pool_hinge_count(pool));

        struct Scored {
            bool ok = false;
            TermFit fit;
        };
        std::vector<Scored> scored(pool.size());
        parallel_for(pool.size(), options.threads, [&](std::size_t c) {
            const auto& cand = pool[c];
            const HingeTerm& parent = model.terms[cand.parent];
            if (parent.uses_dim(cand.dim) || parent.order() + 1 > options.max_order) return;
            Eigen::MatrixXd z(n, design.cols() + 2);
            z.leftCols(design.cols()) = design;
            for (int i = 0; i < n; ++i) {
                const Scenario& x = fit_set.scenario(i);
                const double base_val = parent.evaluate(x);
                const double u = x[cand.dim] - cand.knot;
                z(i, design.cols()) = base_val * std::max(u, 0.0);
                z(i, design.cols() + 1) = base_val * std::max(-u, 0.0);
            }
            Scored s;
            if (fit_columns(z, y, options, classical(options) ? nullptr : &current.mu, s.fit))
                s.ok = true;
            scored[c] = std::move(s);
        });

        int pick = -1;
        for (std::size_t c = 0; c < scored.size(); ++c)
            if (scored[c].ok && (pick < 0 || scored[c].fit.criterion < scored[pick].fit.criterion))
                pick = static_cast<int>(c);
        if (pick < 0) break;

        const double decrease = current.criterion - scored[pick].fit.criterion;
        if (!(decrease > 0.0) || decrease < options.t_min * current.criterion) break;

        const auto chosen = pool[pick];
        const HingeTerm& parent = model.terms[chosen.parent];
        std::vector<HingeFactor> f_pos = parent.factors;
        f_pos.push_back({chosen.dim, chosen.knot, true});
        std::vector<HingeFactor> f_neg = parent.factors;
        f_neg.push_back({chosen.dim, chosen.knot, false});
        const int idx_pos = static_cast<int>(model.terms.size());
        model.terms.emplace_back(std::move(f_pos));
        model.terms.emplace_back(std::move(f_neg));

        design.conservativeResize(Eigen::NoChange, design.cols() + 2);
        for (int i = 0; i < n; ++i) {
            const Scenario& x = fit_set.scenario(i);
            design(i, idx_pos) = model.terms[idx_pos].evaluate(x);
            design(i, idx_pos + 1) = model.terms[idx_pos + 1].evaluate(x);
        }
        current = scored[pick].fit;
        result.rss_trace.push_back(current.criterion);

        // The paper's pool update: drop the chosen pair, add products of the
        // two new hinges with base hinges on untouched dimensions.
        pool.erase(pool.begin() + pick);
        const int new_order = model.terms[idx_pos].order() + 1;
        if (new_order <= options.max_order) {
            for (int which = 0; which < 2; ++which) {
                const HingeTerm& t = model.terms[idx_pos + which];
                for (const auto& b : base)
                    if (!t.uses_dim(b.dim)) pool.push_back({idx_pos + which, b.dim, b.knot});
            }
        }
    }
    result.pool_trace.push_back(pool_hinge_count(pool));

    model.coefficients = current.beta;
    model.rss = current.criterion;
    return result;
}

MarsModel backward_pass(const MarsModel& model, const FittingSet& fit_set,
                        const MarsOptions& options) {
    if (!options.prune) return model;

    const Eigen::VectorXd y = response_vector(fit_set);
    const int n = static_cast<int>(fit_set.size());

    MarsModel best = model;
    double best_gcv = gcv_mars(model.rss, n, static_cast<int>(model.terms.size()),
                               model.knot_count(), options.gcv_c);

    MarsModel work = model;
    while (work.terms.size() > 1) {
        int pick = -1;
        TermFit pick_fit;
        for (std::size_t drop = 1; drop < work.terms.size(); ++drop) {
            std::vector<HingeTerm> reduced;
            for (std::size_t j = 0; j < work.terms.size(); ++j)
                if (j != drop) reduced.push_back(work.terms[j]);
            TermFit f;
            if (!fit_columns(hinge_design(reduced, fit_set), y, options, nullptr, f)) continue;
            if (pick < 0 || f.criterion < pick_fit.criterion) {
                pick = static_cast<int>(drop);
                pick_fit = f;
            }
        }
        if (pick < 0) break;

        work.terms.erase(work.terms.begin() + pick);
        work.coefficients = pick_fit.beta;
        work.rss = pick_fit.criterion;
        const double g = gcv_mars(work.rss, n, static_cast<int>(work.terms.size()),
                                  work.knot_count(), options.gcv_c);
        if (g < best_gcv) {
            best_gcv = g;
            best = work;
        }
    }
    return best;
}

double gcv_mars(double rss, int n, int k, int t, double c) {
    const double df = k + c * t;
    if (df >= n) throw std::runtime_error("gcv_mars: effective df >= N");
    const double denom = n - df;
    return n * rss / (denom * denom);
}

}  // namespace proxima
