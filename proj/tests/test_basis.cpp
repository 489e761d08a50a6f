#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <set>

#include "proxima/basis.hpp"
#include "test_util.hpp"

using namespace proxima;
using test_util::term;

TEST_CASE("admissible: boundary cases under 4/4/3") {
    const Restrictions r{100, 4, 4, 3};
    CHECK(admissible(term({4, 0, 0}), r));
    CHECK(admissible(term({2, 2, 0}), r));
    CHECK_FALSE(admissible(term({3, 2, 0}), r));  // degree 5 > d2
    CHECK_FALSE(admissible(term({4, 1, 0}), r));  // interaction exponent 4 > d3
}

TEST_CASE("restrictions: parsing and validation") {
    const Restrictions r = Restrictions::parse("150-443");
    CHECK(r.k_max == 150);
    CHECK(r.d1 == 4);
    CHECK(r.d2 == 4);
    CHECK(r.d3 == 3);
    CHECK(r.to_string() == "150-443");
    CHECK_THROWS_AS(Restrictions::parse("150-4x3"), std::invalid_argument);
    CHECK_THROWS_AS(Restrictions::parse("150"), std::invalid_argument);
    CHECK_THROWS_AS((Restrictions{10, 2, 1, 3}).validate(), std::invalid_argument);  // d1 > d2
}

TEST_CASE("marginality: intercept alone yields the linear monomials") {
    for (int d : {1, 5, 15}) {
        const Restrictions r{100, 4, 4, 3};
        const auto cands = marginality_candidates({BasisTerm::intercept(d)}, r, d);
        CHECK(cands.size() == static_cast<std::size_t>(d));
        for (const auto& c : cands) CHECK(c.degree() == 1);
    }
}

TEST_CASE("marginality: derivative closure filters candidates") {
    // current = {1, x1}: x2 and x1^2 qualify, x1 x2 does not (x2 missing).
    const Restrictions r{100, 4, 4, 3};
    const auto cands = marginality_candidates({term({0, 0}), term({1, 0})}, r, 2);
    REQUIRE(cands.size() == 2);
    CHECK(cands[0] == term({0, 1}));
    CHECK(cands[1] == term({2, 0}));
}

TEST_CASE("marginality: saturated set yields nothing") {
    const Restrictions r{100, 1, 1, 1};
    // universe under 1/1/1 in 2D: 1, x1, x2 (x1 x2 has degree 2 > d2)
    const std::vector<BasisTerm> current{term({0, 0}), term({1, 0}), term({0, 1})};
    CHECK(marginality_candidates(current, r, 2).empty());
}

TEST_CASE("marginality: candidates are duplicate-free, disjoint from current, ordered") {
    const Restrictions r{100, 3, 4, 2};
    std::vector<BasisTerm> current{term({0, 0, 0}), term({1, 0, 0}), term({0, 1, 0}),
                                   term({1, 1, 0}), term({2, 0, 0})};
    const auto cands = marginality_candidates(current, r, 3);
    std::set<BasisTerm> seen(cands.begin(), cands.end());
    CHECK(seen.size() == cands.size());
    for (const auto& c : cands) {
        CHECK(std::find(current.begin(), current.end(), c) == current.end());
        CHECK(admissible(c, r));
    }
    CHECK(std::is_sorted(cands.begin(), cands.end()));
}

TEST_CASE("design matrix: direct evaluation") {
    const std::vector<BasisTerm> terms{term({0, 0}), term({1, 0}), term({0, 2})};
    const std::vector<Scenario> pts{{2.0, 3.0}};
    const Eigen::MatrixXd z = design_matrix(terms, pts);
    CHECK(z(0, 0) == 1.0);
    CHECK(z(0, 1) == 2.0);
    CHECK(z(0, 2) == 9.0);
}

TEST_CASE("design matrix: intercept column is ones, 0^0 = 1") {
    const auto scenarios = test_util::random_scenarios(3, 20, 42);
    const std::vector<BasisTerm> terms{term({0, 0, 0}), term({1, 1, 0})};
    const Eigen::MatrixXd z = design_matrix(terms, scenarios);
    for (int i = 0; i < 20; ++i) CHECK(z(i, 0) == 1.0);
    const Eigen::MatrixXd z0 = design_matrix(terms, std::vector<Scenario>{{0.0, 0.0, 0.0}});
    CHECK(z0(0, 0) == 1.0);  // 0^0
    CHECK(z0(0, 1) == 0.0);
}

TEST_CASE("admissible universe is sorted and within caps") {
    const Restrictions r{100, 2, 3, 1};
    const auto universe = admissible_universe(r, 3);
    CHECK(std::is_sorted(universe.begin(), universe.end()));
    CHECK(universe.front().is_intercept());
    for (const auto& t : universe) CHECK(admissible(t, r));
    // spot-check membership: x1^2 in, x1^2 x2 out (interaction exponent 2 > d3)
    CHECK(std::count(universe.begin(), universe.end(), term({2, 0, 0})) == 1);
    CHECK(std::count(universe.begin(), universe.end(), term({2, 1, 0})) == 0);
}
