#pragma once

#include <memory>
#include <string>
#include <variant>

#include "proxima/fgls.hpp"
#include "proxima/gam.hpp"
#include "proxima/glm.hpp"
#include "proxima/kernel.hpp"
#include "proxima/mars.hpp"
#include "proxima/ols.hpp"
#include "proxima/types.hpp"

namespace proxima {

enum class Method { ols, glm, fgls, gam, mars, kernel };

Method parse_method(const std::string& name);
std::string method_name(Method m);

// A kernel model together with the fitting data it is bound to.
struct KernelBundle {
    KernelModel model;
    std::shared_ptr<const FittingSet> data;
};

// Uniform wrapper over the fitted model families: one predict contract and
// a line-oriented text serialization.
class ProxyModel {
  public:
    ProxyModel() = default;
    explicit ProxyModel(OlsFit fit, int dimension);
    explicit ProxyModel(GlmFit fit, int dimension);
    explicit ProxyModel(FglsFit fit, int dimension);
    explicit ProxyModel(GamFit fit, int dimension);
    explicit ProxyModel(MarsModel model, int dimension);
    explicit ProxyModel(KernelBundle bundle, int dimension);

    Method method() const { return method_; }
    int dimension() const { return dimension_; }
    double predict(const Scenario& x) const;

    void write(const std::string& path) const;
    static ProxyModel read(const std::string& path);

    const OlsFit& as_ols() const { return std::get<OlsFit>(payload_); }
    const GlmFit& as_glm() const { return std::get<GlmFit>(payload_); }
    const FglsFit& as_fgls() const { return std::get<FglsFit>(payload_); }
    const GamFit& as_gam() const { return std::get<GamFit>(payload_); }
    const MarsModel& as_mars() const { return std::get<MarsModel>(payload_); }
    const KernelBundle& as_kernel() const { return std::get<KernelBundle>(payload_); }

  private:
    Method method_ = Method::ols;
    int dimension_ = 0;
    std::variant<OlsFit, GlmFit, FglsFit, GamFit, MarsModel, KernelBundle> payload_;
};

}  // namespace proxima
