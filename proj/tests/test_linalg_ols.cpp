#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "proxima/linalg.hpp"
#include "proxima/ols.hpp"
#include "test_util.hpp"

using namespace proxima;
using test_util::term;

TEST_CASE("solve_ls: exact line") {
    Eigen::MatrixXd z(4, 2);
    z << 1, 0, 1, 1, 1, 2, 1, 3;
    Eigen::Vector4d y(0, 1, 2, 3);
    const auto sol = solve_ls(z, y);
    CHECK(sol.coefficients(0) == doctest::Approx(0.0).epsilon(1e-12));
    CHECK(sol.coefficients(1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(sol.rss == doctest::Approx(0.0).epsilon(1e-20));
    CHECK(sol.rank == 2);
}

TEST_CASE("solve_ls: intercept-only mean, hand RSS") {
    Eigen::MatrixXd z = Eigen::MatrixXd::Ones(4, 1);
    Eigen::Vector4d y(0, 1, 2, 3);
    const auto sol = solve_ls(z, y);
    CHECK(sol.coefficients(0) == doctest::Approx(1.5));
    CHECK(sol.rss == doctest::Approx(5.0));  // sum (y - 1.5)^2
}

TEST_CASE("solve_ls: duplicate columns name the dependent column") {
    Eigen::MatrixXd z(5, 2);
    z.col(0).setOnes();
    z.col(1).setOnes();
    Eigen::VectorXd y = Eigen::VectorXd::LinSpaced(5, 0, 1);
    CHECK_THROWS_WITH_AS(solve_ls(z, y), doctest::Contains("column 1"), std::runtime_error);
}

TEST_CASE("solve_ls: residual orthogonality on random instances") {
    for (std::uint64_t seed : {1u, 2u, 3u}) {
        const auto scen = test_util::random_scenarios(3, 60, seed);
        const std::vector<BasisTerm> terms{term({0, 0, 0}), term({1, 0, 0}), term({0, 1, 0}),
                                           term({0, 0, 2})};
        const Eigen::MatrixXd z = design_matrix(terms, scen);
        Eigen::VectorXd y(60);
        for (int i = 0; i < 60; ++i) y(i) = std::sin(3.0 * scen[i][0]) + scen[i][2];
        const auto sol = solve_ls(z, y);
        const double lhs = (z.transpose() * (y - z * sol.coefficients)).lpNorm<Eigen::Infinity>();
        const double rhs = (z.transpose() * y).lpNorm<Eigen::Infinity>();
        CHECK(lhs <= 1e-8 * rhs);
    }
}

TEST_CASE("solve_wls: unit weights match solve_ls") {
    const auto scen = test_util::random_scenarios(2, 40, 7);
    const std::vector<BasisTerm> terms{term({0, 0}), term({1, 0}), term({0, 1})};
    const Eigen::MatrixXd z = design_matrix(terms, scen);
    Eigen::VectorXd y(40);
    for (int i = 0; i < 40; ++i) y(i) = scen[i][0] - 2.0 * scen[i][1] + 0.1 * scen[i][0] * scen[i][0];
    const auto a = solve_ls(z, y);
    const auto b = solve_wls(z, y, Eigen::VectorXd::Ones(40));
    CHECK((a.coefficients - b.coefficients).lpNorm<Eigen::Infinity>() <= 1e-12);
}

TEST_CASE("solve_wls: zero weight drops the row") {
    Eigen::MatrixXd z(4, 1);
    z.setOnes();
    Eigen::Vector4d y(1, 1, 1, 100);  // outlier in the last row
    Eigen::Vector4d w(1, 1, 1, 0);
    const auto sol = solve_wls(z, y, w);
    CHECK(sol.coefficients(0) == doctest::Approx(1.0));
}

TEST_CASE("solve_wls: hand-computed weighted mean") {
    Eigen::MatrixXd z(2, 1);
    z.setOnes();
    Eigen::Vector2d y(0, 2), w(3, 1);
    // minimize 3 b^2 + (2-b)^2 => b = 0.5
    CHECK(solve_wls(z, y, w).coefficients(0) == doctest::Approx(0.5));
}

TEST_CASE("solve_wls: negative weight and too-few effective rows") {
    Eigen::MatrixXd z(2, 1);
    z.setOnes();
    Eigen::Vector2d y(0, 2);
    CHECK_THROWS_AS(solve_wls(z, y, Eigen::Vector2d(1, -1)), std::invalid_argument);
    CHECK_THROWS_AS(solve_wls(z, y, Eigen::Vector2d(0, 0)), std::invalid_argument);
}

TEST_CASE("fit_ols: exact fit is a degenerate-fit error") {
    const std::vector<BasisTerm> terms{term({0}), term({1})};
    const FittingSet set = test_util::linear_data(terms, {2.0, 3.0}, 10, 0.0, 5);
    CHECK_THROWS_WITH_AS(fit_ols(set, terms), doctest::Contains("degenerate perfect fit"),
                         std::runtime_error);
}

TEST_CASE("fit_ols: intercept-only hand values") {
    std::vector<FittingPoint> pts(4);
    for (int i = 0; i < 4; ++i) {
        pts[i].x = {0.1 * i};
        pts[i].y = i;  // 0,1,2,3
    }
    const FittingSet set(1, pts);
    const std::vector<BasisTerm> terms{term({0})};
    const OlsFit fit = fit_ols(set, terms);
    CHECK(fit.coefficients(0) == doctest::Approx(1.5));
    CHECK(fit.sigma2_ml == doctest::Approx(1.25));
    CHECK(fit.sample_variance == doctest::Approx(5.0 / 3.0));
    // Theorem-1 relation: sigma2_ml = (N-K)/N * s
    CHECK(fit.sigma2_ml == doctest::Approx((4.0 - 1.0) / 4.0 * fit.sample_variance));
}

TEST_CASE("fit_ols: N = K rejected") {
    const std::vector<BasisTerm> terms{term({0}), term({1})};
    std::vector<FittingPoint> pts(2);
    pts[0] = {{0.0}, 1.0};
    pts[1] = {{1.0}, 2.5};
    CHECK_THROWS_AS(fit_ols(FittingSet(1, pts), terms), std::invalid_argument);
}

TEST_CASE("aic_ols: hand value and arithmetic identities") {
    OlsFit fit;
    fit.n = 4;
    fit.k = 1;
    fit.sigma2_ml = 1.25;
    const double aic = aic_ols(fit);
    CHECK(aic == doctest::Approx(4.0 * (std::log(2.0 * std::numbers::pi * 1.25) + 1.0) + 4.0)
                     .epsilon(1e-12));
    CHECK(aic == doctest::Approx(16.2441).epsilon(1e-3));

    // adding a useless coefficient with unchanged sigma2 adds exactly 2
    OlsFit plus = fit;
    plus.k = 2;
    CHECK(aic_ols(plus) - aic == doctest::Approx(2.0).epsilon(1e-12));

    // scaling sigma2 by e^2 at N = 10 adds 20
    OlsFit scaled;
    scaled.n = 10;
    scaled.k = 1;
    scaled.sigma2_ml = 1.25;
    OlsFit scaled2 = scaled;
    scaled2.sigma2_ml = 1.25 * std::exp(2.0);
    CHECK(aic_ols(scaled2) - aic_ols(scaled) == doctest::Approx(20.0).epsilon(1e-10));
}

TEST_CASE("ols predict") {
    OlsFit fit;
    fit.terms = {term({0})};
    fit.coefficients = Eigen::VectorXd::Constant(1, 1.5);
    CHECK(fit.predict({-0.7}) == 1.5);
    CHECK(fit.predict({0.9}) == 1.5);

    OlsFit line;
    line.terms = {term({0}), term({1})};
    line.coefficients = Eigen::Vector2d(2.0, 3.0);
    CHECK(line.predict({0.5}) == doctest::Approx(3.5));

    // base scenario: only zero-exponent contributions survive
    OlsFit mixed;
    mixed.terms = {term({0, 0}), term({1, 0}), term({1, 1})};
    mixed.coefficients = Eigen::Vector3d(7.0, 3.0, -4.0);
    CHECK(mixed.predict({0.0, 0.0}) == doctest::Approx(7.0));
}

TEST_CASE("fit_ols: residual mean is zero with the intercept present") {
    const std::vector<BasisTerm> terms{term({0, 0}), term({1, 0}), term({0, 1})};
    const FittingSet set = test_util::linear_data(terms, {1.0, 2.0, -1.0}, 200, 0.5, 11);
    const OlsFit fit = fit_ols(set, terms);
    double mean = 0.0;
    for (std::size_t i = 0; i < set.size(); ++i) mean += set.response(i) - fit.predict(set.scenario(i));
    mean /= static_cast<double>(set.size());
    CHECK(std::abs(mean) <= 1e-10);
}
