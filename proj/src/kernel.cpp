#include "proxima/kernel.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "proxima/linalg.hpp"

namespace proxima {

KernelShape parse_kernel_shape(const std::string& name) {
    if (name == "gaussian") return KernelShape::gaussian;
    if (name == "epanechnikov") return KernelShape::epanechnikov;
    if (name == "uniform") return KernelShape::uniform;
    throw std::invalid_argument("unknown kernel shape: " + name);
}

KernelMode parse_kernel_mode(const std::string& name) {
    if (name == "lc") return KernelMode::local_constant;
    if (name == "ll") return KernelMode::local_linear;
    throw std::invalid_argument("unknown kernel mode: " + name);
}

BandwidthCriterion parse_bandwidth_criterion(const std::string& name) {
    if (name == "aic") return BandwidthCriterion::aic;
    if (name == "loocv") return BandwidthCriterion::loocv;
    throw std::invalid_argument("unknown bandwidth criterion: " + name);
}

double KernelSpec::density(double u) const {
    u = std::abs(u);
    double d2 = 0.0;
    switch (shape) {
        case KernelShape::gaussian:
            d2 = std::exp(-0.5 * u * u) / std::sqrt(2.0 * std::numbers::pi);
            break;
        case KernelShape::epanechnikov:
            d2 = u <= 1.0 ? 0.75 * (1.0 - u * u) : 0.0;
            break;
        case KernelShape::uniform:
            d2 = u <= 1.0 ? 0.5 : 0.0;
            break;
    }
    if (order == 2) return d2;
    // Fourth order by twicing: a polynomial factor kills the second moment.
    switch (shape) {
        case KernelShape::gaussian: return 0.5 * (3.0 - u * u) * d2;
        case KernelShape::epanechnikov: return (15.0 / 8.0) * (1.0 - (7.0 / 3.0) * u * u) * d2;
        case KernelShape::uniform: return (9.0 / 4.0 - (15.0 / 4.0) * u * u) * d2;
    }
    return 0.0;
}

namespace {

// Basis coordinates of a scenario under the model's terms (intercept kept at
// index 0 but excluded from the kernel product).
Eigen::VectorXd coords(const std::vector<BasisTerm>& terms, const Scenario& x) {
    Eigen::VectorXd z(terms.size());
    for (std::size_t k = 0; k < terms.size(); ++k) z(k) = terms[k].evaluate(x);
    return z;
}

// Kernel weight of fitting coordinates zi relative to target z0.
double kernel_weight(const KernelModel& model, const Eigen::VectorXd& zi,
                     const Eigen::VectorXd& z0) {
    double w = 1.0;
    for (Eigen::Index k = 1; k < zi.size(); ++k) {
        w *= model.kernel.density((zi(k) - z0(k)) / model.bandwidths(k - 1));
        if (w == 0.0) return 0.0;
    }
    return w;
}

struct KernelWorkspace {
    Eigen::MatrixXd z;  // N x K basis coordinates
    Eigen::VectorXd y;
};

KernelWorkspace make_workspace(const KernelModel& model, const FittingSet& fit_set) {
    if (model.kernel.order != 2 && model.kernel.order != 4)
        throw std::invalid_argument("kernel model: order must be 2 or 4");
    KernelWorkspace ws;
    ws.z.resize(fit_set.size(), model.terms.size());
    ws.y.resize(fit_set.size());
    for (std::size_t i = 0; i < fit_set.size(); ++i) {
        ws.z.row(i) = coords(model.terms, fit_set.scenario(i)).transpose();
        ws.y(i) = fit_set.response(i);
    }
    if (static_cast<Eigen::Index>(model.bandwidths.size()) !=
        static_cast<Eigen::Index>(model.terms.size()) - 1)
        throw std::invalid_argument("kernel model: need one bandwidth per non-intercept term");
    for (Eigen::Index k = 0; k < model.bandwidths.size(); ++k)
        if (!(model.bandwidths(k) > 0))
            throw std::invalid_argument("kernel model: bandwidths must be positive");
    return ws;
}

Eigen::VectorXd weights_at(const KernelModel& model, const KernelWorkspace& ws,
                           const Eigen::VectorXd& z0) {
    Eigen::VectorXd w(ws.z.rows());
    for (Eigen::Index i = 0; i < ws.z.rows(); ++i)
        w(i) = kernel_weight(model, ws.z.row(i).transpose(), z0);
    return w;
}

double lc_estimate(const Eigen::VectorXd& w, const Eigen::VectorXd& y) {
    const double denom = w.sum();
    if (denom == 0.0) throw std::runtime_error("kernel: empty neighborhood at target");
    if (!(denom > 0.0)) throw std::runtime_error("kernel: non-positive kernel mass at target");
    return w.dot(y) / denom;
}

// Local weighted least squares, predicting at z0.
double ll_estimate(const KernelWorkspace& ws, const Eigen::VectorXd& w,
                   const Eigen::VectorXd& z0) {
    const Eigen::Index k = ws.z.cols();
    if (w.minCoeff() >= 0.0) {
        if ((w.array() > 0.0).count() < k)
            throw std::runtime_error("kernel: local rank deficiency at target (too few neighbors)");
        try {
            const auto sol = solve_wls(ws.z, ws.y, w);
            return z0.dot(sol.coefficients);
        } catch (const std::exception&) {
            throw std::runtime_error("kernel: local rank deficiency at target");
        }
    }
    // Signed weights (order-4 kernels): normal equations.
    Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
    Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
    for (Eigen::Index i = 0; i < ws.z.rows(); ++i) {
        if (w(i) == 0.0) continue;
        a += w(i) * ws.z.row(i).transpose() * ws.z.row(i);
        b += w(i) * ws.z.row(i).transpose() * ws.y(i);
    }
    Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
    if (!lu.isInvertible()) throw std::runtime_error("kernel: local rank deficiency at target");
    return z0.dot(lu.solve(b));
}

}  // namespace

double predict_lc(const KernelModel& model, const FittingSet& fit_set, const Scenario& x0) {
    const KernelWorkspace ws = make_workspace(model, fit_set);
    const Eigen::VectorXd z0 = coords(model.terms, x0);
    return lc_estimate(weights_at(model, ws, z0), ws.y);
}

double predict_ll(const KernelModel& model, const FittingSet& fit_set, const Scenario& x0) {
    const KernelWorkspace ws = make_workspace(model, fit_set);
    const Eigen::VectorXd z0 = coords(model.terms, x0);
    return ll_estimate(ws, weights_at(model, ws, z0), z0);
}

double predict_kernel(const KernelModel& model, const FittingSet& fit_set, const Scenario& x0) {
    return model.mode == KernelMode::local_constant ? predict_lc(model, fit_set, x0)
                                                    : predict_ll(model, fit_set, x0);
}

HatDiagnostics hat_trace(const KernelModel& model, const FittingSet& fit_set) {
    const KernelWorkspace ws = make_workspace(model, fit_set);
    const Eigen::Index n = ws.z.rows();
    const Eigen::Index k = ws.z.cols();

    HatDiagnostics diag;
    double rss = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd z0 = ws.z.row(i).transpose();
        const Eigen::VectorXd w = weights_at(model, ws, z0);
        const double self = w(i);  // K(z_i, z_i)
        if (model.mode == KernelMode::local_constant) {
            const double denom = w.sum();
            if (!(denom > 0.0))
                throw std::runtime_error("kernel: empty neighborhood at fitting point");
            diag.trace_h += self / denom;
            const double fi = w.dot(ws.y) / denom;
            rss += (ws.y(i) - fi) * (ws.y(i) - fi);
        } else {
            Eigen::MatrixXd a = Eigen::MatrixXd::Zero(k, k);
            Eigen::VectorXd b = Eigen::VectorXd::Zero(k);
            for (Eigen::Index r = 0; r < n; ++r) {
                if (w(r) == 0.0) continue;
                a += w(r) * ws.z.row(r).transpose() * ws.z.row(r);
                b += w(r) * ws.z.row(r).transpose() * ws.y(r);
            }
            Eigen::FullPivLU<Eigen::MatrixXd> lu(a);
            if (!lu.isInvertible())
                throw std::runtime_error("kernel: local rank deficiency at fitting point");
            diag.trace_h += self * z0.dot(lu.solve(z0));
            const double fi = z0.dot(lu.solve(b));
            rss += (ws.y(i) - fi) * (ws.y(i) - fi);
        }
    }
    diag.sigma2 = rss / n;
    return diag;
}

double aic_hurvich(const HatDiagnostics& diag, int n) {
    if (diag.trace_h + 2.0 >= n)
        throw std::runtime_error("aic_hurvich: tr(H) + 2 must be below N");
    return std::log(diag.sigma2) + (1.0 + diag.trace_h / n) / (1.0 - (diag.trace_h + 2.0) / n);
}

double loocv(const KernelModel& model, const FittingSet& fit_set) {
    const KernelWorkspace ws = make_workspace(model, fit_set);
    const Eigen::Index n = ws.z.rows();

    double acc = 0.0;
    for (Eigen::Index i = 0; i < n; ++i) {
        const Eigen::VectorXd z0 = ws.z.row(i).transpose();
        Eigen::VectorXd w = weights_at(model, ws, z0);
        w(i) = 0.0;
        double fi = 0.0;
        if (model.mode == KernelMode::local_constant) {
            const double denom = w.sum();
            if (!(denom > 0.0))
                throw std::runtime_error("loocv: leave-one-out neighborhood empty");
            fi = w.dot(ws.y) / denom;
        } else {
            fi = ll_estimate(ws, w, z0);
        }
        acc += (ws.y(i) - fi) * (ws.y(i) - fi);
    }
    return acc / n;
}

Eigen::VectorXd select_bandwidths(const FittingSet& fit_set, const std::vector<BasisTerm>& terms,
                                  KernelMode mode, const KernelSpec& kernel,
                                  const BandwidthOptions& options) {
    const int n = static_cast<int>(fit_set.size());
    const int k = static_cast<int>(terms.size());
    if (options.bw_fraction <= 0 || options.bw_fraction > 1)
        throw std::invalid_argument("select_bandwidths: bw_fraction must lie in (0, 1]");
    const int n_sub = static_cast<int>(std::ceil(options.bw_fraction * n));
    if (n_sub < 10 * k)
        throw std::invalid_argument("select_bandwidths: subsample too small (need >= 10 K points)");

    // Deterministic stride subsample.
    std::vector<FittingPoint> sub_points(n_sub);
    for (int i = 0; i < n_sub; ++i)
        sub_points[i] = fit_set.points()[static_cast<std::size_t>(i) * n / n_sub];
    const FittingSet sub(fit_set.dimension(), std::move(sub_points));

    // Coordinate ranges on the subsample set the search intervals.
    Eigen::VectorXd range(k - 1);
    for (int c = 1; c < k; ++c) {
        double lo = std::numeric_limits<double>::infinity(), hi = -lo;
        for (int i = 0; i < n_sub; ++i) {
            const double v = terms[c].evaluate(sub.scenario(i));
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
        range(c - 1) = hi - lo;
        if (!(range(c - 1) > 0)) range(c - 1) = 1.0;  // constant coordinate, factor cancels
    }

    KernelModel model;
    model.terms = terms;
    model.mode = mode;
    model.kernel = kernel;
    model.bandwidths = range;  // the log-midpoint of every search interval

    bool any_finite = false;
    auto score = [&](const Eigen::VectorXd& bw) {
        KernelModel trial = model;
        trial.bandwidths = bw;
        try {
            double v;
            if (options.criterion == BandwidthCriterion::aic)
                v = aic_hurvich(hat_trace(trial, sub), n_sub);
            else
                v = loocv(trial, sub);
            if (std::isfinite(v)) {
                any_finite = true;
                return v;
            }
        } catch (const std::exception&) {
        }
        return std::numeric_limits<double>::infinity();
    };

    double best_score = score(model.bandwidths);
    const double golden = (std::sqrt(5.0) - 1.0) / 2.0;
    for (int sweep = 0; sweep < options.sweeps; ++sweep) {
        for (int c = 0; c < k - 1; ++c) {
            double lo = std::log(1e-2 * range(c));
            double hi = std::log(1e2 * range(c));
            auto eval_at = [&](double logbw) {
                Eigen::VectorXd bw = model.bandwidths;
                bw(c) = std::exp(logbw);
                return score(bw);
            };
            double x1 = hi - golden * (hi - lo);
            double x2 = lo + golden * (hi - lo);
            double f1 = eval_at(x1);
            double f2 = eval_at(x2);
            double coord_best = model.bandwidths(c);
            double coord_best_score = best_score;
            for (int it = 0; it < options.golden_iterations; ++it) {
                if (f1 < coord_best_score) { coord_best_score = f1; coord_best = std::exp(x1); }
                if (f2 < coord_best_score) { coord_best_score = f2; coord_best = std::exp(x2); }
                if (f1 <= f2) {
                    hi = x2;
                    x2 = x1;
                    f2 = f1;
                    x1 = hi - golden * (hi - lo);
                    f1 = eval_at(x1);
                } else {
                    lo = x1;
                    x1 = x2;
                    f1 = f2;
                    x2 = lo + golden * (hi - lo);
                    f2 = eval_at(x2);
                }
            }
            model.bandwidths(c) = coord_best;
            best_score = coord_best_score;
        }
    }
    if (!any_finite)
        throw std::runtime_error("select_bandwidths: criterion non-finite over the entire search interval");
    return model.bandwidths;
}

}  // namespace proxima
