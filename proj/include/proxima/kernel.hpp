#pragma once

#include <memory>
#include <string>
#include <vector>

#include "proxima/basis.hpp"
#include "proxima/types.hpp"

namespace proxima {

enum class KernelShape { gaussian, epanechnikov, uniform };
enum class KernelMode { local_constant, local_linear };
enum class BandwidthCriterion { aic, loocv };

KernelShape parse_kernel_shape(const std::string& name);
KernelMode parse_kernel_mode(const std::string& name);
BandwidthCriterion parse_bandwidth_criterion(const std::string& name);

struct KernelSpec {
    KernelShape shape = KernelShape::gaussian;
    int order = 2;  // 2 or 4; order 4 by the twicing construction

    double density(double u) const;  // D(u), symmetric, maximal at 0
};

// Memory-based model: prediction always needs the fitting set it was
// calibrated on. Bandwidths cover the non-intercept basis coordinates only
// (the intercept's kernel factor is constant and cancels).
struct KernelModel {
    std::vector<BasisTerm> terms;  // intercept first
    Eigen::VectorXd bandwidths;    // size K-1
    KernelMode mode = KernelMode::local_constant;
    KernelSpec kernel;
    std::string data_path;  // fitting CSV the model is bound to (for model files)
};

struct HatDiagnostics {
    double trace_h = 0.0;
    double sigma2 = 0.0;  // mean squared residual at the fitting points
};

double predict_lc(const KernelModel& model, const FittingSet& fit_set, const Scenario& x0);
double predict_ll(const KernelModel& model, const FittingSet& fit_set, const Scenario& x0);
double predict_kernel(const KernelModel& model, const FittingSet& fit_set, const Scenario& x0);

HatDiagnostics hat_trace(const KernelModel& model, const FittingSet& fit_set);

// Hurvich improved AIC: log(sigma2) + (1 + tr(H)/N) / (1 - (tr(H)+2)/N).
double aic_hurvich(const HatDiagnostics& diag, int n);

// Leave-one-out CV: mean squared error with each point's own weight removed.
double loocv(const KernelModel& model, const FittingSet& fit_set);

struct BandwidthOptions {
    BandwidthCriterion criterion = BandwidthCriterion::loocv;
    double bw_fraction = 1.0;  // share of fitting points used in the search
    int golden_iterations = 40;
    int sweeps = 2;
};

// Deterministic: stride subsample, then coordinate-wise golden-section
// search on log-bandwidth over [1e-2, 1e2] times each coordinate's range.
Eigen::VectorXd select_bandwidths(const FittingSet& fit_set, const std::vector<BasisTerm>& terms,
                                  KernelMode mode, const KernelSpec& kernel,
                                  const BandwidthOptions& options);

}  // namespace proxima
