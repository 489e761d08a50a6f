#pragma once

#include <utility>
#include <vector>

#include "proxima/basis.hpp"
#include "proxima/families.hpp"
#include "proxima/glm.hpp"
#include "proxima/types.hpp"

namespace proxima {

// One P-spline smooth of a monomial basis value z_k = e_k(X): cubic
// B-splines on equally spaced knots with a second-difference penalty.
struct SmoothSpec {
    BasisTerm term;
    int spline_count = 0;  // J >= 4
    double z_min = 0.0, z_max = 0.0;
    double lambda = 1.0;
    static constexpr int penalty_order = 2;
};

struct BsplineColumns {
    Eigen::MatrixXd columns;  // N x J, mean-centered
    Eigen::VectorXd means;    // the column means that were subtracted
};

// Cubic B-spline design for one smooth: J columns on J+4 equally spaced
// knots (J-4 interior), mean-centered for identifiability. Outside the knot
// range the boundary polynomial is extended linearly.
BsplineColumns bspline_columns(const Eigen::VectorXd& z, const SmoothSpec& spec);

// Evaluation used by prediction: the J (uncentered) basis values at z.
Eigen::VectorXd bspline_values(const SmoothSpec& spec, double z);

struct GamSmoothBlock {
    SmoothSpec spec;
    Eigen::VectorXd means;         // J column means
    Eigen::VectorXd coefficients;  // J-1 free coefficients (last one pinned to 0)
};

struct GamFit {
    double intercept = 0.0;
    std::vector<GamSmoothBlock> smooths;
    Family family = Family::gaussian;
    Link link = Link::identity;
    double dispersion = 1.0;
    double effective_df = 0.0;
    double deviance = 0.0;
    Eigen::VectorXd mu;
    Eigen::VectorXd y;
    int iterations = 0;
    bool converged = false;
    int n = 0;
    int columns = 0;  // assembled design columns: 1 + sum (J-1)

    double predict(const Scenario& x) const;
    double linear_predictor(const Scenario& x) const;
};

struct GamOptions {
    int spline_count = 8;  // J
    double tol = 1e-8;
    int max_iter = 50;
};

// PIRLS: the IRLS loop with the penalized weighted least-squares solve in
// augmented-rows form (sqrt-penalty rows stacked beneath the weighted
// design).
GamFit fit_gam(const FittingSet& fit_set, const std::vector<BasisTerm>& smooth_terms,
               Family family, Link link, const std::vector<double>& lambdas,
               const GamOptions& options = {});

double effective_df(const GamFit& fit);  // tr((Z^T W Z + S)^-1 Z^T W Z)
double gcv_gam(const GamFit& fit);       // N D / (N - df)^2
double aic_gam(const GamFit& fit);       // -2 l + 2 (df + p)

enum class GamCriterion { gcv, aic };
GamCriterion parse_gam_criterion(const std::string& name);

// Shared-lambda grid scan followed by one coordinate-wise refinement pass
// per smooth; ties break toward the larger (smoother) lambda.
std::vector<double> select_lambda(const FittingSet& fit_set,
                                  const std::vector<BasisTerm>& smooth_terms, Family family,
                                  Link link, const std::vector<double>& grid,
                                  GamCriterion criterion, const GamOptions& options = {});

}  // namespace proxima
