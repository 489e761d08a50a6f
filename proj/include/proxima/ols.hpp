#pragma once

#include <vector>

#include "proxima/basis.hpp"
#include "proxima/linalg.hpp"
#include "proxima/types.hpp"

namespace proxima {

struct OlsFit {
    std::vector<BasisTerm> terms;
    Eigen::VectorXd coefficients;
    double sigma2_ml = 0.0;      // RSS / N, the ML error-variance estimate
    double sample_variance = 0.0;  // RSS / (N - K)
    double rss = 0.0;
    int n = 0;
    int k = 0;

    double predict(const Scenario& x) const;
};

// Requires N > K and an exact-zero residual is rejected ("degenerate perfect
// fit") because AIC is undefined there.
OlsFit fit_ols(const FittingSet& fit_set, const std::vector<BasisTerm>& terms);

// AIC = N (log(2 pi sigma2) + 1) + 2 (K + 1).
double aic_ols(const OlsFit& fit);

}  // namespace proxima
