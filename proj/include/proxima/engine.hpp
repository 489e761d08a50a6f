#pragma once

#include <optional>
#include <string>
#include <vector>

#include "proxima/basis.hpp"
#include "proxima/fgls.hpp"
#include "proxima/gam.hpp"
#include "proxima/glm.hpp"
#include "proxima/kernel.hpp"
#include "proxima/mars.hpp"
#include "proxima/proxy_model.hpp"
#include "proxima/types.hpp"

namespace proxima {

enum class SelectionMode { stepwise, stagewise, dynamic };

struct EngineConfig {
    Method method = Method::ols;
    Restrictions restrictions{20, 4, 4, 3};
    SelectionMode mode = SelectionMode::stepwise;
    int stage_length = 1;       // L for stagewise
    double proportion = 0.25;   // candidate share for dynamic
    int threads = 1;
    bool record_rejections = false;

    // method-specific knobs
    Family family = Family::gaussian;
    Link link = Link::identity;
    GlmOptions glm;
    GamOptions gam;
    std::vector<double> gam_lambda_grid = {1e-4, 1e-3, 1e-2, 1e-1, 1.0, 1e1, 1e2, 1e3, 1e4};
    GamCriterion gam_criterion = GamCriterion::gcv;
    FglsOptions fgls;
    std::vector<BasisTerm> fgls_variance_terms;  // fixed variance model for type II runs
    int fgls_m_max = 6;
    int fgls_variant = 2;  // 1: variance selection only, 2: renewed adaptive FGLS
    MarsOptions mars;
    KernelMode kernel_mode = KernelMode::local_constant;
    KernelSpec kernel_spec;
    BandwidthOptions kernel_bw;
    std::string kernel_basis = "adaptive";  // adaptive | linear | combined
    int kernel_basis_kmax = 8;
    std::string kernel_data_path;  // recorded on the model for serialization
};

struct TraceIteration {
    int iteration = 0;
    std::vector<std::string> accepted;         // labels of accepted terms
    std::vector<BasisTerm> accepted_terms;     // set for the monomial methods
    double criterion_before = 0.0;
    double criterion_after = 0.0;
    std::size_t candidate_count = 0;
    std::size_t skipped = 0;  // candidates whose fits failed
    std::vector<double> rejected_scores;
};

struct SelectionTrace {
    double initial_criterion = 0.0;
    std::vector<TraceIteration> iterations;

    std::string to_csv() const;
};

struct CalibrationResult {
    ProxyModel model;
    SelectionTrace trace;
    std::vector<BasisTerm> terms;  // final monomial terms (empty for MARS)
};

// The adaptive calibration loop: candidates by the principle of marginality,
// one regression and criterion evaluation per candidate, acceptance of the
// improving candidate(s), termination when nothing improves or k_max is hit.
// MARS runs its own forward/backward mechanics behind the same entry point;
// kernel calibration runs an adaptive OLS pre-selection for its basis.
CalibrationResult calibrate(const FittingSet& fit_set, const EngineConfig& config);

// Brute-force reference: the criterion-minimal downward-closed subset of the
// admissible universe. Only valid for universes of at most 15 terms.
ProxyModel exhaustive_reference(const FittingSet& fit_set, const EngineConfig& config);

// The two-stage FGLS procedure: an adaptive OLS pre-run fixes the proxy
// terms, type I selects the variance model on them, and the type II variant
// reruns the adaptive selection with FGLS regression under that variance
// model.
struct FglsPipeline {
    CalibrationResult ols_run;
    VarianceModel variance_model;
    CalibrationResult final_run;
};

FglsPipeline run_fgls(const FittingSet& fit_set, const EngineConfig& config);

SelectionMode parse_selection_mode(const std::string& name);

}  // namespace proxima
