#include "proxima/ols.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace proxima {

double OlsFit::predict(const Scenario& x) const {
    double v = 0.0;
    for (std::size_t j = 0; j < terms.size(); ++j) v += coefficients(j) * terms[j].evaluate(x);
    return v;
}

OlsFit fit_ols(const FittingSet& fit_set, const std::vector<BasisTerm>& terms) {
    const int n = static_cast<int>(fit_set.size());
    const int k = static_cast<int>(terms.size());
    if (n <= k)
        throw std::invalid_argument("fit_ols: need more fitting points than coefficients (N=" +
                                    std::to_string(n) + ", K=" + std::to_string(k) + ")");

    const Eigen::MatrixXd z = design_matrix(terms, fit_set.points());
    const Eigen::VectorXd y = response_vector(fit_set);
    const auto sol = solve_ls(z, y);

    // An essentially exact fit leaves log(sigma2) meaningless; the adaptive
    // engine treats this as "model saturated".
    const double scale = std::max(1.0, y.squaredNorm());
    if (sol.rss <= 1e-24 * scale)
        throw std::runtime_error("fit_ols: degenerate perfect fit (RSS = 0)");

    OlsFit fit;
    fit.terms = terms;
    fit.coefficients = sol.coefficients;
    fit.rss = sol.rss;
    fit.n = n;
    fit.k = k;
    fit.sigma2_ml = sol.rss / n;
    fit.sample_variance = sol.rss / (n - k);
    return fit;
}

double aic_ols(const OlsFit& fit) {
    if (fit.sigma2_ml <= 0) throw std::invalid_argument("aic_ols: sigma2 must be positive");
    return fit.n * (std::log(2.0 * std::numbers::pi * fit.sigma2_ml) + 1.0) + 2.0 * (fit.k + 1);
}

}  // namespace proxima
