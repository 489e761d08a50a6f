#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>
#include <set>

#include "proxima/engine.hpp"
#include "proxima/ols.hpp"
#include "test_util.hpp"

using namespace proxima;
using test_util::term;

namespace {

FittingSet noise_data(int d, int n, std::uint64_t seed, double signal = 0.0) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::normal_distribution<double> nrm(0.0, 1.0);
    std::vector<FittingPoint> pts(n);
    for (auto& p : pts) {
        p.x.resize(d);
        for (double& v : p.x) v = uni(rng);
        p.y = nrm(rng);
        if (signal != 0.0) p.y = 1.0 + 2.0 * p.x[0] + 3.0 * p.x[1] + signal * nrm(rng);
    }
    return FittingSet(d, std::move(pts));
}

EngineConfig ols_config(int k_max, int d1 = 4, int d2 = 4, int d3 = 3) {
    EngineConfig c;
    c.method = Method::ols;
    c.restrictions = Restrictions{k_max, d1, d2, d3};
    return c;
}

bool downward_closed(const std::vector<BasisTerm>& terms) {
    const std::set<BasisTerm> have(terms.begin(), terms.end());
    for (const auto& t : terms)
        for (int d = 0; d < t.dimension(); ++d) {
            if (t.exponents[d] == 0) continue;
            BasisTerm deriv = t;
            --deriv.exponents[d];
            if (!have.count(deriv)) return false;
        }
    return true;
}

}  // namespace

TEST_CASE("engine: pure noise usually terminates at the intercept") {
    int stopped = 0;
    for (std::uint64_t seed = 1; seed <= 50; ++seed) {
        const FittingSet set = noise_data(1, 200, seed * 7);
        const CalibrationResult run = calibrate(set, ols_config(10));
        if (run.terms.size() == 1) ++stopped;
    }
    CHECK(stopped >= 40);  // >= 80% of seeds
}

TEST_CASE("engine: linear signal is recovered, the idle factor excluded") {
    // k_max leaves room for exactly the two informative monomials; with an
    // open-ended budget AIC would admit the idle factor at its usual ~16%
    // false-inclusion rate eventually.
    int good = 0;
    for (std::uint64_t seed = 1; seed <= 40; ++seed) {
        const FittingSet set = noise_data(3, 400, seed * 13, 0.05);
        const CalibrationResult run = calibrate(set, ols_config(3, 1, 1, 1));
        const std::set<BasisTerm> have(run.terms.begin(), run.terms.end());
        const bool has_signal =
            have.count(term({1, 0, 0})) == 1 && have.count(term({0, 1, 0})) == 1;
        const bool x3_out = have.count(term({0, 0, 1})) == 0;
        if (has_signal && x3_out) ++good;
    }
    CHECK(good >= 38);  // >= 95% of seeds
}

TEST_CASE("engine: k_max caps the term count") {
    const FittingSet set = noise_data(3, 300, 5, 0.01);
    const CalibrationResult run = calibrate(set, ols_config(3));
    CHECK(run.terms.size() <= 3);
}

TEST_CASE("engine: accepted iterations strictly decrease the criterion") {
    for (std::uint64_t seed = 1; seed <= 10; ++seed) {
        const FittingSet set = noise_data(3, 250, seed * 17, 0.2);
        const CalibrationResult run = calibrate(set, ols_config(12));
        double last = run.trace.initial_criterion;
        for (const auto& it : run.trace.iterations) {
            CHECK(it.criterion_before == last);
            CHECK(it.criterion_after < it.criterion_before);
            last = it.criterion_after;
        }
    }
}

TEST_CASE("engine: byte-identical traces under parallel evaluation") {
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const FittingSet set = noise_data(4, 300, seed * 19, 0.1);
        EngineConfig serial = ols_config(10);
        serial.threads = 1;
        EngineConfig parallel = ols_config(10);
        parallel.threads = 8;
        const std::string a = calibrate(set, serial).trace.to_csv();
        const std::string b = calibrate(set, parallel).trace.to_csv();
        CHECK(a == b);
    }
}

TEST_CASE("engine: final term set is downward closed") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const FittingSet set = noise_data(3, 300, seed * 23, 0.3);
        const CalibrationResult run = calibrate(set, ols_config(15));
        CHECK(downward_closed(run.terms));
    }
}

TEST_CASE("engine: stagewise with L = 1 matches stepwise") {
    const FittingSet set = noise_data(3, 350, 29, 0.15);
    EngineConfig stepwise = ols_config(9);
    EngineConfig stagewise = ols_config(9);
    stagewise.mode = SelectionMode::stagewise;
    stagewise.stage_length = 1;
    CHECK(calibrate(set, stepwise).trace.to_csv() == calibrate(set, stagewise).trace.to_csv());
}

TEST_CASE("engine: stagewise accepts several terms per iteration") {
    const FittingSet set = noise_data(4, 500, 31, 0.02);
    EngineConfig config = ols_config(9, 2, 2, 2);
    config.mode = SelectionMode::stagewise;
    config.stage_length = 3;
    const CalibrationResult run = calibrate(set, config);
    REQUIRE(!run.trace.iterations.empty());
    CHECK(run.trace.iterations[0].accepted.size() >= 2);
    double last = run.trace.initial_criterion;
    for (const auto& it : run.trace.iterations) {
        CHECK(it.criterion_after < last);
        last = it.criterion_after;
    }
}

TEST_CASE("engine: dynamic mode sizes the stage from the candidate count") {
    const FittingSet set = noise_data(4, 500, 37, 0.02);
    EngineConfig config = ols_config(9, 2, 2, 2);
    config.mode = SelectionMode::dynamic;
    config.proportion = 0.5;
    const CalibrationResult run = calibrate(set, config);
    REQUIRE(!run.trace.iterations.empty());
    // first iteration: 4 candidates, proportion 0.5 -> up to 2 accepted
    CHECK(run.trace.iterations[0].accepted.size() == 2);
}

TEST_CASE("exhaustive reference: intercept-only universe and helpful-term pick") {
    const FittingSet set = noise_data(1, 120, 41, 0.1);
    EngineConfig tiny = ols_config(4, 1, 1, 1);
    const ProxyModel best = exhaustive_reference(set, tiny);
    const std::set<BasisTerm> chosen(best.as_ols().terms.begin(), best.as_ols().terms.end());
    CHECK(chosen.count(term({1})) == 1);  // the linear term carries the signal

    // degenerate universe: only the intercept is admissible
    EngineConfig none = ols_config(4, 0, 0, 0);
    const ProxyModel only = exhaustive_reference(set, none);
    CHECK(only.as_ols().terms.size() == 1);
}

TEST_CASE("exhaustive reference: greedy criterion is never better") {
    for (std::uint64_t seed = 1; seed <= 8; ++seed) {
        const FittingSet set = noise_data(2, 200, seed * 43, 0.4);
        EngineConfig config = ols_config(6, 2, 2, 1);
        const CalibrationResult greedy = calibrate(set, config);
        const ProxyModel best = exhaustive_reference(set, config);
        CHECK(aic_ols(greedy.model.as_ols()) >= aic_ols(best.as_ols()) - 1e-9);
    }
}

TEST_CASE("exhaustive reference: oversized universe is rejected") {
    const FittingSet set = noise_data(3, 100, 47);
    EngineConfig config = ols_config(30, 4, 4, 3);
    CHECK_THROWS_AS(exhaustive_reference(set, config), std::invalid_argument);
}

TEST_CASE("engine: glm and gam methods run the same loop") {
    const FittingSet set = noise_data(2, 200, 53, 0.1);
    EngineConfig glm_config = ols_config(5, 2, 2, 2);
    glm_config.method = Method::glm;
    glm_config.family = Family::gaussian;
    glm_config.link = Link::identity;
    const CalibrationResult glm_run = calibrate(set, glm_config);
    CHECK(glm_run.model.method() == Method::glm);
    CHECK(downward_closed(glm_run.terms));

    EngineConfig gam_config = ols_config(4, 2, 2, 2);
    gam_config.method = Method::gam;
    gam_config.gam.spline_count = 5;
    gam_config.gam_lambda_grid = {1e-2, 1e2};
    const CalibrationResult gam_run = calibrate(set, gam_config);
    CHECK(gam_run.model.method() == Method::gam);
    double last = gam_run.trace.initial_criterion;
    for (const auto& it : gam_run.trace.iterations) {
        CHECK(it.criterion_after < last);
        last = it.criterion_after;
    }
}

TEST_CASE("engine: mars runs behind the same entry point") {
    const FittingSet set = noise_data(2, 150, 59, 0.1);
    EngineConfig config;
    config.method = Method::mars;
    config.restrictions = Restrictions{9, 4, 4, 3};
    config.mars.t_min = 1e-6;
    const CalibrationResult run = calibrate(set, config);
    CHECK(run.model.method() == Method::mars);
    double last = run.trace.initial_criterion;
    for (const auto& it : run.trace.iterations) {
        CHECK(it.criterion_after < last);
        last = it.criterion_after;
    }
}

TEST_CASE("engine: kernel calibration selects a basis then bandwidths") {
    const FittingSet set = noise_data(2, 220, 61, 0.15);
    EngineConfig config;
    config.method = Method::kernel;
    config.restrictions = Restrictions{20, 2, 2, 2};
    config.kernel_basis = "adaptive";
    config.kernel_basis_kmax = 4;
    config.kernel_bw.criterion = BandwidthCriterion::loocv;
    const CalibrationResult run = calibrate(set, config);
    CHECK(run.model.method() == Method::kernel);
    CHECK(run.terms.size() <= 4);
    CHECK(run.model.as_kernel().model.bandwidths.size() ==
          static_cast<Eigen::Index>(run.terms.size()) - 1);
    // trace comes from the ols pre-run
    double last = run.trace.initial_criterion;
    for (const auto& it : run.trace.iterations) {
        CHECK(it.criterion_after < last);
        last = it.criterion_after;
    }
}

TEST_CASE("engine: combined kernel basis adds the missing linear monomials") {
    const FittingSet set = noise_data(3, 250, 79, 0.2);
    EngineConfig config;
    config.method = Method::kernel;
    config.restrictions = Restrictions{20, 2, 2, 2};
    config.kernel_basis = "combined";
    config.kernel_basis_kmax = 3;
    const CalibrationResult run = calibrate(set, config);
    const std::set<BasisTerm> have(run.terms.begin(), run.terms.end());
    CHECK(have.count(term({1, 0, 0})) == 1);
    CHECK(have.count(term({0, 1, 0})) == 1);
    CHECK(have.count(term({0, 0, 1})) == 1);
}

TEST_CASE("fgls pipeline: homoscedastic type 2 reduces to the ols path") {
    const FittingSet set = noise_data(2, 400, 67, 0.25);
    EngineConfig config = ols_config(6, 2, 2, 2);
    config.method = Method::fgls;
    config.fgls_variant = 2;
    config.fgls_variance_terms = {term({0, 0})};  // intercept-only variance model

    EngineConfig plain = ols_config(6, 2, 2, 2);
    const CalibrationResult ols_run = calibrate(set, plain);
    const CalibrationResult fgls_run = calibrate(set, config);
    REQUIRE(fgls_run.terms.size() == ols_run.terms.size());
    for (std::size_t i = 0; i < ols_run.terms.size(); ++i)
        CHECK(fgls_run.terms[i] == ols_run.terms[i]);
}

TEST_CASE("fgls pipeline: empty candidate universe keeps the intercept") {
    const FittingSet set = noise_data(2, 100, 71, 0.3);
    EngineConfig config = ols_config(6, 0, 0, 0);
    config.method = Method::fgls;
    config.fgls_variant = 2;
    const FglsPipeline pipeline = run_fgls(set, config);
    CHECK(pipeline.final_run.terms.size() == 1);
    CHECK(pipeline.final_run.terms[0].is_intercept());
}

TEST_CASE("trace csv: layout") {
    const FittingSet set = noise_data(2, 200, 73, 0.05);
    const CalibrationResult run = calibrate(set, ols_config(5, 1, 1, 1));
    const std::string csv = run.trace.to_csv();
    CHECK(csv.rfind("k,accepted,criterion,candidates,skipped\n", 0) == 0);
    CHECK(csv.find("\n0,,") != std::string::npos);
}
