#pragma once

#include <Eigen/Dense>

namespace proxima {

struct LeastSquaresSolution {
    Eigen::VectorXd coefficients;
    int rank = 0;
    double rss = 0.0;
};

// Linear least squares via an in-place Householder QR of Z (the normal
// equations are never formed). A column whose remaining norm after the
// previous reflections falls below 1e-10 times its original norm is treated
// as linearly dependent and reported by index.
LeastSquaresSolution solve_ls(const Eigen::MatrixXd& z, const Eigen::VectorXd& y);

// Weighted least squares: minimizes sum_i w_i (y_i - z_i^T b)^2. Zero-weight
// rows are dropped before factorization; negative weights are an error.
LeastSquaresSolution solve_wls(const Eigen::MatrixXd& z, const Eigen::VectorXd& y,
                               const Eigen::VectorXd& w);

}  // namespace proxima
