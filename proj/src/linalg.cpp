#include "proxima/linalg.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace proxima {

namespace {

constexpr double kRankTolerance = 1e-10;

}  // namespace

LeastSquaresSolution solve_ls(const Eigen::MatrixXd& z, const Eigen::VectorXd& y) {
    const Eigen::Index n = z.rows();
    const Eigen::Index k = z.cols();
    if (y.size() != n) throw std::invalid_argument("solve_ls: response length mismatch");
    if (n < k) throw std::invalid_argument("solve_ls: fewer rows than columns");

    Eigen::MatrixXd a = z;
    Eigen::VectorXd b = y;
    Eigen::VectorXd col_norms(k);
    for (Eigen::Index j = 0; j < k; ++j) col_norms(j) = a.col(j).norm();

    // Householder QR, one reflector per column, applied to [A | b].
    for (Eigen::Index j = 0; j < k; ++j) {
        const Eigen::Index m = n - j;
        Eigen::VectorXd v = a.col(j).tail(m);
        const double norm = v.norm();
        if (norm <= kRankTolerance * std::max(col_norms(j), 1e-300))
            throw std::runtime_error("solve_ls: rank deficiency, column " + std::to_string(j) +
                                     " is linearly dependent");
        const double alpha = v(0) >= 0 ? -norm : norm;
        v(0) -= alpha;
        const double vtv = v.squaredNorm();
        if (vtv > 0) {
            for (Eigen::Index c = j; c < k; ++c) {
                auto block = a.col(c).tail(m);
                const double tau = 2.0 * v.dot(block) / vtv;
                block -= tau * v;
            }
            auto yblock = b.tail(m);
            const double tau = 2.0 * v.dot(yblock) / vtv;
            yblock -= tau * v;
        }
        a(j, j) = alpha;
    }

    LeastSquaresSolution sol;
    sol.rank = static_cast<int>(k);
    sol.coefficients.resize(k);
    for (Eigen::Index j = k - 1; j >= 0; --j) {
        double s = b(j);
        for (Eigen::Index c = j + 1; c < k; ++c) s -= a(j, c) * sol.coefficients(c);
        sol.coefficients(j) = s / a(j, j);
    }
    // Residual recomputed against the original system; the tail of Q^T y
    // would do, but this stays exact when b is overwritten in place.
    sol.rss = (y - z * sol.coefficients).squaredNorm();
    return sol;
}

LeastSquaresSolution solve_wls(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& w) {
    const Eigen::Index n = z.rows();
    const Eigen::Index k = z.cols();
    if (y.size() != n || w.size() != n)
        throw std::invalid_argument("solve_wls: length mismatch");

    Eigen::Index kept = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (w(i) < 0) throw std::invalid_argument("solve_wls: negative weight");
        if (!std::isfinite(w(i))) throw std::invalid_argument("solve_wls: non-finite weight");
        if (w(i) > 0) ++kept;
    }
    if (kept < k)
        throw std::invalid_argument("solve_wls: fewer positive-weight rows than columns");

    Eigen::MatrixXd zs(kept, k);
    Eigen::VectorXd ys(kept);
    Eigen::Index r = 0;
    for (Eigen::Index i = 0; i < n; ++i) {
        if (w(i) == 0) continue;
        const double s = std::sqrt(w(i));
        zs.row(r) = s * z.row(i);
        ys(r) = s * y(i);
        ++r;
    }
    return solve_ls(zs, ys);
}

}  // namespace proxima
