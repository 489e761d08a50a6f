#include "proxima/validation.hpp"

#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

namespace proxima {

ValidationFigures compute_figures(const ProxyModel& model, const ValidationSet& vset) {
    if (model.dimension() != vset.dimension())
        throw std::invalid_argument("compute_figures: model/set dimension mismatch");
    if (vset.size() == 0) throw std::invalid_argument("compute_figures: empty validation set");
    const auto& points = vset.points();
    const std::size_t l = points.size();

    double abs_err = 0.0, sum_abs_y = 0.0, sum_abs_a = 0.0, res_sum = 0.0;
    std::vector<double> fhat(l);
    for (std::size_t i = 0; i < l; ++i) {
        fhat[i] = model.predict(points[i].x);
        abs_err += std::abs(points[i].y - fhat[i]);
        sum_abs_y += std::abs(points[i].y);
        if (vset.has_assets()) sum_abs_a += std::abs(*points[i].asset);
        res_sum += points[i].y - fhat[i];
    }

    ValidationFigures fig;
    if (sum_abs_y <= 0.0)
        throw std::runtime_error("compute_figures: degenerate normalization (sum |y| = 0)");
    fig.mae_rel = abs_err / sum_abs_y;
    if (vset.has_assets()) {
        if (sum_abs_a <= 0.0)
            throw std::runtime_error("compute_figures: degenerate normalization (sum |a| = 0)");
        fig.mae_asset = abs_err / sum_abs_a;
    }
    fig.res = res_sum / l;

    if (vset.base()) {
        const double y0 = vset.base()->y;
        const double f0 = model.predict(vset.base()->x);
        double num = 0.0, denom = 0.0, res0_sum = 0.0;
        for (std::size_t i = 0; i < l; ++i) {
            const double dy = points[i].y - y0;
            const double df = fhat[i] - f0;
            num += std::abs(dy - df);
            denom += std::abs(dy);
            res0_sum += dy - df;
        }
        if (denom <= 0.0)
            throw std::runtime_error("compute_figures: degenerate normalization (sum |y - y0| = 0)");
        fig.mae0 = num / denom;
        fig.res0 = res0_sum / l;
        fig.res_base = fig.res - *fig.res0;
    }
    return fig;
}

namespace {

std::string pct3(double ratio) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.3f", 100.0 * ratio);
    return buf;
}

std::string cur0(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.0f", v);
    return buf;
}

}  // namespace

std::string report(const std::vector<NamedModel>& models,
                   const std::vector<NamedValidationSet>& sets) {
    std::ostringstream os;
    os << "model,set,mae,mae_a,res,mae0,res0,res_base\n";
    for (const auto& m : models) {
        for (const auto& s : sets) {
            const ValidationFigures fig = compute_figures(*m.model, *s.set);
            os << m.name << "," << s.name << "," << pct3(fig.mae_rel) << ",";
            if (fig.mae_asset) os << pct3(*fig.mae_asset);
            os << "," << cur0(fig.res) << ",";
            if (fig.mae0) os << pct3(*fig.mae0);
            os << ",";
            if (fig.res0) os << cur0(*fig.res0);
            os << ",";
            if (fig.res_base) os << cur0(*fig.res_base);
            os << "\n";
        }
    }
    return os.str();
}

}  // namespace proxima
