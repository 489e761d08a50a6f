#pragma once

#include <optional>
#include <string>
#include <vector>

#include "proxima/proxy_model.hpp"
#include "proxima/types.hpp"

namespace proxima {

// The five out-of-sample figures plus the base residual. MAE figures are
// normalized ratios; residual figures live in currency units.
struct ValidationFigures {
    double mae_rel = 0.0;
    std::optional<double> mae_asset;
    double res = 0.0;
    std::optional<double> mae0;
    std::optional<double> res0;
    std::optional<double> res_base;  // res - res0
};

ValidationFigures compute_figures(const ProxyModel& model, const ValidationSet& vset);

struct NamedModel {
    std::string name;
    const ProxyModel* model;
};

struct NamedValidationSet {
    std::string name;
    const ValidationSet* set;
};

// One CSV row per (model, set): MAEs in percent with 3 decimals, residuals
// with 0 decimals. Header: model,set,mae,mae_a,res,mae0,res0,res_base
std::string report(const std::vector<NamedModel>& models,
                   const std::vector<NamedValidationSet>& sets);

}  // namespace proxima
