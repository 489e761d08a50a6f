#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "proxima/gam.hpp"
#include "proxima/linalg.hpp"
#include "proxima/ols.hpp"
#include "test_util.hpp"

using namespace proxima;
using test_util::term;

namespace {

FittingSet smooth_data(int n, std::uint64_t seed, double sigma,
                       double (*f)(double)) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::normal_distribution<double> noise(0.0, sigma);
    std::vector<FittingPoint> pts(n);
    for (auto& p : pts) {
        p.x = {uni(rng)};
        p.y = f(p.x[0]) + (sigma > 0 ? noise(rng) : 0.0);
    }
    return FittingSet(1, std::move(pts));
}

double wiggly(double x) { return std::sin(3.0 * x) + 0.5 * x * x; }
double affine(double x) { return 3.0 + 2.0 * x; }

Eigen::VectorXd z_values(const FittingSet& set, const BasisTerm& t) {
    Eigen::VectorXd z(set.size());
    for (std::size_t i = 0; i < set.size(); ++i) z(i) = t.evaluate(set.scenario(i));
    return z;
}

}  // namespace

TEST_CASE("bsplines: partition of unity before centering") {
    SmoothSpec spec;
    spec.term = term({1});
    spec.spline_count = 7;
    spec.z_min = -1.0;
    spec.z_max = 1.0;
    for (double z : {-1.0, -0.31, 0.0, 0.123, 0.77, 1.0}) {
        const Eigen::VectorXd b = bspline_values(spec, z);
        CHECK(b.sum() == doctest::Approx(1.0).epsilon(1e-10));
        CHECK((b.array() >= -1e-12).all());
    }
}

TEST_CASE("bsplines: centered columns sum to zero per column") {
    const FittingSet set = smooth_data(50, 3, 0.1, wiggly);
    SmoothSpec spec;
    spec.term = term({1});
    spec.spline_count = 6;
    const Eigen::VectorXd z = z_values(set, spec.term);
    spec.z_min = z.minCoeff();
    spec.z_max = z.maxCoeff();
    const BsplineColumns cols = bspline_columns(z, spec);
    for (int j = 0; j < 6; ++j) CHECK(std::abs(cols.columns.col(j).sum()) <= 1e-10 * z.size());
}

TEST_CASE("bsplines: constant argument is an error") {
    SmoothSpec spec;
    spec.term = term({1});
    spec.spline_count = 5;
    spec.z_min = spec.z_max = 0.7;
    Eigen::VectorXd z = Eigen::VectorXd::Constant(10, 0.7);
    CHECK_THROWS_WITH_AS(bspline_columns(z, spec), doctest::Contains("degenerate smooth argument"),
                         std::runtime_error);
}

TEST_CASE("bsplines: linear extension beyond the knot range") {
    SmoothSpec spec;
    spec.term = term({1});
    spec.spline_count = 6;
    spec.z_min = -1.0;
    spec.z_max = 1.0;
    // finite difference at the boundary continues linearly outside
    const Eigen::VectorXd at = bspline_values(spec, 1.0);
    const Eigen::VectorXd beyond = bspline_values(spec, 1.3);
    const Eigen::VectorXd further = bspline_values(spec, 1.6);
    const Eigen::VectorXd step1 = beyond - at;
    const Eigen::VectorXd step2 = further - beyond;
    CHECK((step1 - step2).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("fit_gam: gaussian identity equals a hand-assembled penalized solve") {
    const FittingSet set = smooth_data(70, 11, 0.15, wiggly);
    const std::vector<BasisTerm> smooths{term({1})};
    const double lambda = 2.5;
    const GamFit fit = fit_gam(set, smooths, Family::gaussian, Link::identity, {lambda},
                               GamOptions{.spline_count = 6});
    REQUIRE(fit.converged);

    // independent assembly from the public spline surface
    const Eigen::VectorXd z = z_values(set, smooths[0]);
    const BsplineColumns cols = bspline_columns(z, fit.smooths[0].spec);
    const int n = 70, j = 6;
    Eigen::MatrixXd design(n, 1 + (j - 1));
    design.col(0).setOnes();
    design.rightCols(j - 1) = cols.columns.leftCols(j - 1);
    Eigen::MatrixXd d2 = Eigen::MatrixXd::Zero(j - 2, 1 + (j - 1));  // zero intercept column
    for (int r = 0; r < j - 2; ++r)
        for (int c = 0; c < 3; ++c)
            if (r + c < j - 1) d2(r, 1 + r + c) = (c == 1 ? -2.0 : 1.0);
    Eigen::MatrixXd aug(n + j - 2, 1 + (j - 1));
    aug.topRows(n) = design;
    aug.bottomRows(j - 2) = std::sqrt(lambda) * d2;
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(n + j - 2);
    rhs.head(n) = response_vector(set);
    const auto sol = solve_ls(aug, rhs);

    CHECK(fit.intercept == doctest::Approx(sol.coefficients(0)).epsilon(1e-8));
    for (int c = 0; c < j - 1; ++c)
        CHECK(fit.smooths[0].coefficients(c) == doctest::Approx(sol.coefficients(1 + c)).epsilon(1e-7));
}

TEST_CASE("fit_gam: huge lambda flattens the smooth to an affine function") {
    const FittingSet set = smooth_data(80, 5, 0.05, wiggly);
    const GamFit fit = fit_gam(set, {term({1})}, Family::gaussian, Link::identity, {1e12},
                               GamOptions{.spline_count = 8});
    REQUIRE(fit.converged);
    CHECK(effective_df(fit) <= 2.0 + 1e-3);

    // second differences of the fitted curve vanish inside the knot range
    const double z0 = fit.smooths[0].spec.z_min, z1 = fit.smooths[0].spec.z_max;
    const double h = (z1 - z0) / 20.0;
    double prev2 = fit.predict({z0}), prev1 = fit.predict({z0 + h});
    for (int i = 2; i <= 20; ++i) {
        const double cur = fit.predict({z0 + i * h});
        CHECK(std::abs(cur - 2.0 * prev1 + prev2) <= 1e-6 * (std::abs(cur) + 1.0));
        prev2 = prev1;
        prev1 = cur;
    }
}

TEST_CASE("fit_gam: lambda to zero approaches the unpenalized regression spline") {
    const FittingSet set = smooth_data(90, 19, 0.1, wiggly);
    const std::vector<BasisTerm> smooths{term({1})};
    const GamOptions options{.spline_count = 6};
    const GamFit tiny = fit_gam(set, smooths, Family::gaussian, Link::identity, {1e-10}, options);

    const Eigen::VectorXd z = z_values(set, smooths[0]);
    const BsplineColumns cols = bspline_columns(z, tiny.smooths[0].spec);
    Eigen::MatrixXd design(90, 6);
    design.col(0).setOnes();
    design.rightCols(5) = cols.columns.leftCols(5);
    const auto unpenalized = solve_ls(design, response_vector(set));
    CHECK(tiny.deviance == doctest::Approx(unpenalized.rss).epsilon(0.01));
}

TEST_CASE("fit_gam: intercept-only equals intercept-only ols") {
    const FittingSet set = smooth_data(40, 23, 0.2, wiggly);
    const GamFit fit = fit_gam(set, {}, Family::gaussian, Link::identity, {}, GamOptions{});
    const OlsFit ols = fit_ols(set, {term({0})});
    CHECK(fit.intercept == doctest::Approx(ols.coefficients(0)).epsilon(1e-10));
    CHECK(effective_df(fit) == doctest::Approx(1.0).epsilon(1e-9));
    CHECK(aic_gam(fit) == doctest::Approx(aic_ols(ols)).epsilon(1e-6));
}

TEST_CASE("effective_df: zero penalty equals the assembled column count") {
    const FittingSet set = smooth_data(60, 31, 0.1, wiggly);
    for (int j : {4, 6, 8}) {
        const GamFit fit = fit_gam(set, {term({1})}, Family::gaussian, Link::identity, {0.0},
                                   GamOptions{.spline_count = j});
        CHECK(effective_df(fit) == doctest::Approx(fit.columns).epsilon(1e-6));
        CHECK(fit.columns == 1 + (j - 1));
    }
}

TEST_CASE("effective_df: strictly decreasing when lambda grows") {
    const FittingSet set = smooth_data(60, 37, 0.1, wiggly);
    for (double lambda : {1e-3, 1e-1, 1.0, 1e1, 1e3}) {
        const GamFit a = fit_gam(set, {term({1})}, Family::gaussian, Link::identity, {lambda},
                                 GamOptions{.spline_count = 6});
        const GamFit b = fit_gam(set, {term({1})}, Family::gaussian, Link::identity,
                                 {10.0 * lambda}, GamOptions{.spline_count = 6});
        CHECK(effective_df(b) < effective_df(a));
    }
}

TEST_CASE("gcv_gam: formula arithmetic") {
    GamFit fit;
    fit.n = 100;
    fit.deviance = 50.0;
    fit.effective_df = 10.0;
    CHECK(gcv_gam(fit) == doctest::Approx(100.0 * 50.0 / 8100.0).epsilon(1e-10));
    CHECK(gcv_gam(fit) == doctest::Approx(0.6173).epsilon(1e-4));

    GamFit doubled = fit;
    doubled.deviance = 100.0;
    CHECK(gcv_gam(doubled) == doctest::Approx(2.0 * gcv_gam(fit)).epsilon(1e-12));

    GamFit saturated = fit;
    saturated.effective_df = 100.0;
    CHECK_THROWS_AS(gcv_gam(saturated), std::runtime_error);

    // monotone growth toward the df -> N pole
    double last = gcv_gam(fit);
    for (double df : {40.0, 70.0, 90.0, 99.0}) {
        GamFit g = fit;
        g.effective_df = df;
        CHECK(gcv_gam(g) > last);
        last = gcv_gam(g);
    }
}

TEST_CASE("aic_gam: zero-penalty fit matches the unpenalized AIC; df gap of 1 costs 2") {
    const FittingSet set = smooth_data(90, 41, 0.12, wiggly);
    const GamFit fit = fit_gam(set, {term({1})}, Family::gaussian, Link::identity, {0.0},
                               GamOptions{.spline_count = 6});
    // unpenalized AIC with K = column count
    const double sigma2 = fit.deviance / fit.n;
    const double direct =
        fit.n * (std::log(2.0 * std::numbers::pi * sigma2) + 1.0) + 2.0 * (fit.columns + 1);
    CHECK(aic_gam(fit) == doctest::Approx(direct).epsilon(1e-9));

    GamFit shifted = fit;
    shifted.effective_df = fit.effective_df + 1.0;
    CHECK(aic_gam(shifted) - aic_gam(fit) == doctest::Approx(2.0).epsilon(1e-9));
}

TEST_CASE("fit_gam: fitted smooths are centered over the fitting rows") {
    const FittingSet set = smooth_data(75, 43, 0.1, wiggly);
    const GamFit fit = fit_gam(set, {term({1})}, Family::gaussian, Link::identity, {0.5},
                               GamOptions{.spline_count = 7});
    double sum = 0.0, scale = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i) {
        const double h = fit.linear_predictor(set.scenario(i)) - fit.intercept;
        sum += h;
        scale += std::abs(h);
    }
    CHECK(std::abs(sum) <= 1e-6 * std::max(scale, 1.0));
}

TEST_CASE("fit_gam: spline count below 4 is rejected") {
    const FittingSet set = smooth_data(30, 47, 0.1, wiggly);
    CHECK_THROWS_AS(fit_gam(set, {term({1})}, Family::gaussian, Link::identity, {1.0},
                            GamOptions{.spline_count = 3}),
                    std::invalid_argument);
}

TEST_CASE("select_lambda: pure noise prefers the largest lambda") {
    // The grid ends differ by ~6 effective df, so GCV separates them
    // reliably; near-duplicate smoothness levels would race on noise.
    int hits = 0;
    const std::vector<double> grid{1e-4, 1e4};
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        std::mt19937_64 rng(seed * 977);
        std::uniform_real_distribution<double> uni(-1.0, 1.0);
        std::normal_distribution<double> noise(0.0, 1.0);
        std::vector<FittingPoint> pts(100);
        for (auto& p : pts) {
            p.x = {uni(rng)};
            p.y = noise(rng);
        }
        const FittingSet set(1, pts);
        const auto lambdas = select_lambda(set, {term({1})}, Family::gaussian, Link::identity,
                                           grid, GamCriterion::gcv, GamOptions{.spline_count = 8});
        if (lambdas[0] == 1e4) ++hits;
    }
    CHECK(hits >= 45);  // >= 90% of seeds
}

TEST_CASE("select_lambda: exact affine signal ties toward the largest lambda") {
    const FittingSet set = smooth_data(50, 53, 0.0, affine);
    const std::vector<double> grid{1e-3, 1.0, 1e3};
    const auto lambdas = select_lambda(set, {term({1})}, Family::gaussian, Link::identity, grid,
                                       GamCriterion::gcv, GamOptions{.spline_count = 5});
    CHECK(lambdas[0] == 1e3);
}

TEST_CASE("fit_gam: gamma random component with log link") {
    std::mt19937_64 rng(71);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<FittingPoint> pts(90);
    for (auto& p : pts) {
        p.x = {uni(rng)};
        const double mu = std::exp(1.0 + std::sin(2.0 * p.x[0]));
        std::gamma_distribution<double> g(25.0, mu / 25.0);
        p.y = g(rng);
    }
    const FittingSet set(1, pts);
    const GamFit fit = fit_gam(set, {term({1})}, Family::gamma, Link::log, {1.0},
                               GamOptions{.spline_count = 6});
    CHECK(fit.converged);
    CHECK(fit.predict({0.0}) > 0.0);  // log link keeps the mean positive
    CHECK(fit.deviance < 90.0 * 0.2);  // shape 25 keeps unit deviances small
}

TEST_CASE("select_lambda: single-point grid returns it") {
    const FittingSet set = smooth_data(40, 59, 0.1, wiggly);
    const auto lambdas = select_lambda(set, {term({1})}, Family::gaussian, Link::identity, {0.37},
                                       GamCriterion::gcv, GamOptions{.spline_count = 5});
    REQUIRE(lambdas.size() == 1);
    CHECK(lambdas[0] == 0.37);
}
