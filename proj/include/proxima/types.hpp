#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace proxima {

// A scenario is one point of the fitting space: the stress levels of the D
// risk factors. The data producer is expected to normalize stresses to
// [-1,1]^D; the library never rescales.
using Scenario = std::vector<double>;

struct FittingPoint {
    Scenario x;
    double y = 0.0;
};

class FittingSet {
  public:
    FittingSet() = default;
    FittingSet(int dimension, std::vector<FittingPoint> points);

    int dimension() const { return dimension_; }
    std::size_t size() const { return points_.size(); }
    const std::vector<FittingPoint>& points() const { return points_; }
    const Scenario& scenario(std::size_t i) const { return points_[i].x; }
    double response(std::size_t i) const { return points_[i].y; }
    std::vector<double> responses() const;

  private:
    int dimension_ = 0;
    std::vector<FittingPoint> points_;
};

struct ValidationPoint {
    Scenario x;
    double y = 0.0;
    std::optional<double> asset;
};

struct BasePoint {
    Scenario x;
    double y = 0.0;
};

class ValidationSet {
  public:
    ValidationSet() = default;
    ValidationSet(int dimension, std::vector<ValidationPoint> points,
                  std::optional<BasePoint> base = std::nullopt);

    int dimension() const { return dimension_; }
    std::size_t size() const { return points_.size(); }
    const std::vector<ValidationPoint>& points() const { return points_; }
    const std::optional<BasePoint>& base() const { return base_; }
    bool has_assets() const { return has_assets_; }

  private:
    int dimension_ = 0;
    std::vector<ValidationPoint> points_;
    std::optional<BasePoint> base_;
    bool has_assets_ = false;
};

// Label of the economic variable a data set refers to (BEL, AC, ...).
struct EconomicVariableLabel {
    enum class Kind { bel, ac, other };
    Kind kind = Kind::other;
    std::string text;

    static EconomicVariableLabel parse(const std::string& s);
    std::string to_string() const;
};

}  // namespace proxima
