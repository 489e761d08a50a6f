#include "proxima/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <set>
#include <sstream>
#include <stdexcept>

#include "proxima/parallel.hpp"

namespace proxima {

SelectionMode parse_selection_mode(const std::string& name) {
    if (name == "stepwise") return SelectionMode::stepwise;
    if (name == "stagewise") return SelectionMode::stagewise;
    if (name == "dynamic") return SelectionMode::dynamic;
    throw std::invalid_argument("unknown selection mode: " + name);
}

namespace {

std::string g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

struct ScoredFit {
    bool ok = false;
    double criterion = 0.0;
    ProxyModel model;
};

// One regression + criterion evaluation, per the engine's method binding.
class TermRegression {
  public:
    TermRegression(const FittingSet& fit_set, const EngineConfig& config)
        : fit_set_(fit_set), config_(config) {
        if (config.method == Method::fgls) {
            variance_terms_ = config.fgls_variance_terms;
            if (variance_terms_.empty())
                variance_terms_ = {BasisTerm::intercept(fit_set.dimension())};
        }
    }

    ScoredFit fit(const std::vector<BasisTerm>& terms) const {
        ScoredFit out;
        try {
            switch (config_.method) {
                case Method::ols: {
                    OlsFit f = fit_ols(fit_set_, terms);
                    out.criterion = aic_ols(f);
                    out.model = ProxyModel(std::move(f), fit_set_.dimension());
                    break;
                }
                case Method::glm: {
                    GlmFit f = fit_glm(fit_set_, terms, config_.family, config_.link, config_.glm);
                    out.criterion = aic_glm(f);
                    out.model = ProxyModel(std::move(f), fit_set_.dimension());
                    break;
                }
                case Method::fgls: {
                    FglsFit f = fit_fgls(fit_set_, terms, variance_terms_, config_.fgls);
                    out.criterion = aic_fgls(f, fit_set_);
                    out.model = ProxyModel(std::move(f), fit_set_.dimension());
                    break;
                }
                case Method::gam: {
                    std::vector<BasisTerm> smooths;
                    for (const auto& t : terms)
                        if (!t.is_intercept()) smooths.push_back(t);
                    std::vector<double> lambdas;
                    if (smooths.empty()) {
                        lambdas = {};
                    } else {
                        lambdas = select_lambda(fit_set_, smooths, config_.family, config_.link,
                                                config_.gam_lambda_grid, config_.gam_criterion,
                                                config_.gam);
                    }
                    GamFit f = fit_gam(fit_set_, smooths, config_.family, config_.link, lambdas,
                                       config_.gam);
                    out.criterion =
                        config_.gam_criterion == GamCriterion::gcv ? gcv_gam(f) : aic_gam(f);
                    out.model = ProxyModel(std::move(f), fit_set_.dimension());
                    break;
                }
                default:
                    throw std::logic_error("TermRegression: method has no term-set binding");
            }
            out.ok = std::isfinite(out.criterion);
        } catch (const std::exception&) {
            out.ok = false;
        }
        return out;
    }

  private:
    const FittingSet& fit_set_;
    const EngineConfig& config_;
    std::vector<BasisTerm> variance_terms_;
};

CalibrationResult calibrate_monomial(const FittingSet& fit_set, const EngineConfig& config) {
    const int dimension = fit_set.dimension();
    const TermRegression regression(fit_set, config);

    std::vector<BasisTerm> terms{BasisTerm::intercept(dimension)};
    ScoredFit current = regression.fit(terms);
    if (!current.ok)
        throw std::runtime_error("calibrate: intercept-only fit failed");

    CalibrationResult result;
    result.trace.initial_criterion = current.criterion;

    int iteration = 0;
    while (static_cast<int>(terms.size()) < config.restrictions.k_max) {
        const auto candidates = marginality_candidates(terms, config.restrictions, dimension);
        if (candidates.empty()) break;

        std::vector<ScoredFit> scored(candidates.size());
        parallel_for(candidates.size(), config.threads, [&](std::size_t c) {
            std::vector<BasisTerm> trial = terms;
            trial.push_back(candidates[c]);
            scored[c] = regression.fit(trial);
        });

        std::size_t skipped = 0;
        std::vector<std::size_t> improving;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            if (!scored[c].ok) {
                ++skipped;
                continue;
            }
            if (scored[c].criterion < current.criterion) improving.push_back(c);
        }
        if (improving.empty()) break;
        // Ties on the criterion keep the lexicographically smaller candidate.
        std::stable_sort(improving.begin(), improving.end(), [&](std::size_t a, std::size_t b) {
            return scored[a].criterion < scored[b].criterion;
        });

        std::size_t stage = 1;
        if (config.mode == SelectionMode::stagewise)
            stage = std::max(1, config.stage_length);
        else if (config.mode == SelectionMode::dynamic)
            stage = static_cast<std::size_t>(
                std::ceil(config.proportion * static_cast<double>(candidates.size())));
        stage = std::min({stage, improving.size(),
                          static_cast<std::size_t>(config.restrictions.k_max - terms.size())});

        // Joint refit of the accepted stage; shrink the stage if the joint
        // model fails the strict-improvement gate.
        bool accepted = false;
        for (std::size_t take = stage; take >= 1; --take) {
            std::vector<BasisTerm> accepted_terms;
            std::vector<BasisTerm> trial = terms;
            for (std::size_t i = 0; i < take; ++i) {
                accepted_terms.push_back(candidates[improving[i]]);
                trial.push_back(candidates[improving[i]]);
            }
            ScoredFit joint = take == 1 ? std::move(scored[improving[0]]) : regression.fit(trial);
            if (joint.ok && joint.criterion < current.criterion) {
                TraceIteration rec;
                rec.iteration = ++iteration;
                for (const auto& t : accepted_terms) rec.accepted.push_back(t.to_string());
                rec.accepted_terms = accepted_terms;
                rec.criterion_before = current.criterion;
                rec.criterion_after = joint.criterion;
                rec.candidate_count = candidates.size();
                rec.skipped = skipped;
                if (config.record_rejections)
                    for (std::size_t c = 0; c < candidates.size(); ++c)
                        rec.rejected_scores.push_back(scored[c].ok ? scored[c].criterion
                                                                   : std::nan(""));
                result.trace.iterations.push_back(std::move(rec));
                terms = std::move(trial);
                current = std::move(joint);
                accepted = true;
                break;
            }
        }
        if (!accepted) break;
    }

    result.model = std::move(current.model);
    result.terms = std::move(terms);
    return result;
}

CalibrationResult calibrate_mars(const FittingSet& fit_set, const EngineConfig& config) {
    MarsOptions options = config.mars;
    options.family = config.family;
    options.link = config.link;
    options.threads = config.threads;
    options.k_max = config.restrictions.k_max;

    const MarsForwardResult fwd = forward_pass(fit_set, options);
    CalibrationResult result;
    result.trace.initial_criterion = fwd.rss_trace.front();
    for (std::size_t i = 1; i < fwd.rss_trace.size(); ++i) {
        TraceIteration rec;
        rec.iteration = static_cast<int>(i);
        rec.accepted.push_back(fwd.model.terms[2 * i - 1].to_string());
        rec.accepted.push_back(fwd.model.terms[2 * i].to_string());
        rec.criterion_before = fwd.rss_trace[i - 1];
        rec.criterion_after = fwd.rss_trace[i];
        rec.candidate_count = fwd.pool_trace[i - 1] / 2;  // reflected pairs
        result.trace.iterations.push_back(std::move(rec));
    }

    MarsModel final_model = backward_pass(fwd.model, fit_set, options);
    result.model = ProxyModel(std::move(final_model), fit_set.dimension());
    return result;
}

CalibrationResult calibrate_kernel(const FittingSet& fit_set, const EngineConfig& config) {
    const int dimension = fit_set.dimension();

    CalibrationResult result;
    std::vector<BasisTerm> terms;
    if (config.kernel_basis == "linear") {
        terms.push_back(BasisTerm::intercept(dimension));
        for (int d = 0; d < dimension; ++d) {
            BasisTerm t = BasisTerm::intercept(dimension);
            t.exponents[d] = 1;
            terms.push_back(t);
        }
    } else if (config.kernel_basis == "adaptive" || config.kernel_basis == "combined") {
        EngineConfig pre = config;
        pre.method = Method::ols;
        pre.mode = SelectionMode::stepwise;
        pre.restrictions.k_max = config.kernel_basis_kmax;
        CalibrationResult ols_run = calibrate_monomial(fit_set, pre);
        terms = std::move(ols_run.terms);
        result.trace = std::move(ols_run.trace);
        if (config.kernel_basis == "combined") {
            const std::set<BasisTerm> have(terms.begin(), terms.end());
            for (int d = 0; d < dimension; ++d) {
                BasisTerm t = BasisTerm::intercept(dimension);
                t.exponents[d] = 1;
                if (!have.count(t)) terms.push_back(t);
            }
        }
    } else {
        throw std::invalid_argument("kernel.basis must be adaptive|linear|combined, got '" +
                                    config.kernel_basis + "'");
    }

    KernelBundle bundle;
    bundle.model.terms = terms;
    bundle.model.mode = config.kernel_mode;
    bundle.model.kernel = config.kernel_spec;
    bundle.model.data_path = config.kernel_data_path;
    bundle.model.bandwidths =
        select_bandwidths(fit_set, terms, config.kernel_mode, config.kernel_spec, config.kernel_bw);
    bundle.data = std::make_shared<FittingSet>(fit_set);

    result.model = ProxyModel(std::move(bundle), dimension);
    result.terms = std::move(terms);
    return result;
}

}  // namespace

CalibrationResult calibrate(const FittingSet& fit_set, const EngineConfig& config) {
    config.restrictions.validate();
    switch (config.method) {
        case Method::mars: return calibrate_mars(fit_set, config);
        case Method::kernel: return calibrate_kernel(fit_set, config);
        default: return calibrate_monomial(fit_set, config);
    }
}

ProxyModel exhaustive_reference(const FittingSet& fit_set, const EngineConfig& config) {
    const int dimension = fit_set.dimension();
    const auto universe = admissible_universe(config.restrictions, dimension);
    if (universe.size() > 15)
        throw std::invalid_argument("exhaustive_reference: candidate universe larger than 15 terms");

    std::vector<BasisTerm> others;
    for (const auto& t : universe)
        if (!t.is_intercept()) others.push_back(t);
    const std::size_t u = others.size();

    const TermRegression regression(fit_set, config);
    bool found = false;
    double best_criterion = 0.0;
    ProxyModel best_model;

    for (std::size_t mask = 0; mask < (std::size_t{1} << u); ++mask) {
        std::vector<BasisTerm> subset{BasisTerm::intercept(dimension)};
        for (std::size_t i = 0; i < u; ++i)
            if (mask & (std::size_t{1} << i)) subset.push_back(others[i]);
        if (static_cast<int>(subset.size()) > config.restrictions.k_max) continue;

        const std::set<BasisTerm> have(subset.begin(), subset.end());
        bool closed = true;
        for (const auto& t : subset) {
            for (int d = 0; d < dimension && closed; ++d) {
                if (t.exponents[d] == 0) continue;
                BasisTerm deriv = t;
                --deriv.exponents[d];
                closed = have.count(deriv) != 0;
            }
            if (!closed) break;
        }
        if (!closed) continue;

        ScoredFit fit = regression.fit(subset);
        if (!fit.ok) continue;
        if (!found || fit.criterion < best_criterion) {
            found = true;
            best_criterion = fit.criterion;
            best_model = std::move(fit.model);
        }
    }
    if (!found) throw std::runtime_error("exhaustive_reference: no subset produced a valid fit");
    return best_model;
}

FglsPipeline run_fgls(const FittingSet& fit_set, const EngineConfig& config) {
    FglsPipeline pipeline;

    EngineConfig ols_config = config;
    ols_config.method = Method::ols;
    pipeline.ols_run = calibrate(fit_set, ols_config);

    const OlsFit& ols_fit = pipeline.ols_run.model.as_ols();
    auto [variance_model, type1_fit] =
        select_variance_model_type1(fit_set, ols_fit, config.fgls_m_max, config.fgls,
                                    config.threads);
    pipeline.variance_model = variance_model;

    if (config.fgls_variant == 1) {
        pipeline.final_run.model = ProxyModel(std::move(type1_fit), fit_set.dimension());
        pipeline.final_run.terms = ols_fit.terms;
        pipeline.final_run.trace = pipeline.ols_run.trace;
    } else {
        EngineConfig type2 = config;
        type2.method = Method::fgls;
        type2.fgls_variance_terms = variance_model.terms;
        pipeline.final_run = calibrate(fit_set, type2);
    }
    return pipeline;
}

std::string SelectionTrace::to_csv() const {
    std::ostringstream os;
    os << "k,accepted,criterion,candidates,skipped\n";
    os << "0,," << g17(initial_criterion) << ",,\n";
    for (const auto& it : iterations) {
        os << it.iteration << ",\"";
        for (std::size_t i = 0; i < it.accepted.size(); ++i) {
            if (i) os << " ";
            os << it.accepted[i];
        }
        os << "\"," << g17(it.criterion_after) << "," << it.candidate_count << "," << it.skipped
           << "\n";
    }
    return os.str();
}

}  // namespace proxima
