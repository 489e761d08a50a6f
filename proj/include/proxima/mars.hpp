#pragma once

#include <vector>

#include "proxima/basis.hpp"
#include "proxima/families.hpp"
#include "proxima/types.hpp"

namespace proxima {

struct HingeFactor {
    int dim = 0;      // risk factor index, 0-based
    double knot = 0.0;
    bool positive = true;  // true: max(x_d - t, 0); false: max(t - x_d, 0)

    auto operator<=>(const HingeFactor&) const = default;
};

// Product of hinge factors on pairwise distinct dimensions; the empty
// product is the intercept.
struct HingeTerm {
    std::vector<HingeFactor> factors;

    HingeTerm() = default;
    explicit HingeTerm(std::vector<HingeFactor> f);

    bool is_intercept() const { return factors.empty(); }
    int order() const { return static_cast<int>(factors.size()); }
    bool uses_dim(int d) const;
    double evaluate(const Scenario& x) const;
    std::string to_string() const;

    auto operator<=>(const HingeTerm&) const = default;
};

struct MarsModel {
    std::vector<HingeTerm> terms;  // intercept first
    Eigen::VectorXd coefficients;
    Family family = Family::gaussian;
    Link link = Link::identity;
    double rss = 0.0;  // deviance for generalized models
    int n = 0;

    double predict(const Scenario& x) const;
    int knot_count() const;  // distinct (dim, knot) pairs over all factors
};

// A reflected candidate pair: parent term index (0 = intercept) times the
// two hinges on (dim, knot).
struct MarsCandidatePair {
    int parent = 0;
    int dim = 0;
    double knot = 0.0;
};

struct MarsOptions {
    int k_max = 21;
    double t_min = 1e-5;
    int max_order = 3;          // interaction order cap
    int knot_cap = 64;          // max distinct knots kept per dimension
    Family family = Family::gaussian;
    Link link = Link::identity;
    bool prune = true;          // backward pass on/off
    double gcv_c = 0.0;         // knot penalty c in df = K + c T
    int threads = 1;
};

// The initial pool C1: both hinges per distinct stress value per dimension.
std::vector<MarsCandidatePair> initial_candidates(const FittingSet& fit_set,
                                                  int knot_cap = 64);

// Hinge-function count of a pool (2 per pair), for bookkeeping checks.
std::size_t pool_hinge_count(const std::vector<MarsCandidatePair>& pool);

struct MarsForwardResult {
    MarsModel model;
    std::vector<double> rss_trace;     // criterion after each accepted pair
    std::vector<std::size_t> pool_trace;  // hinge count of the pool per iteration
};

MarsForwardResult forward_pass(const FittingSet& fit_set, const MarsOptions& options);

MarsModel backward_pass(const MarsModel& model, const FittingSet& fit_set,
                        const MarsOptions& options);

// GCV with effective degrees of freedom df = K + c T.
double gcv_mars(double rss, int n, int k, int t, double c);

}  // namespace proxima
