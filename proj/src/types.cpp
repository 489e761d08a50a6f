#include "proxima/types.hpp"

#include <cmath>

namespace proxima {

namespace {

void check_scenario(const Scenario& x, int dimension, const char* what) {
    if (static_cast<int>(x.size()) != dimension)
        throw std::invalid_argument(std::string(what) + ": scenario length does not match dimension");
    for (double v : x)
        if (!std::isfinite(v))
            throw std::invalid_argument(std::string(what) + ": non-finite scenario entry");
}

}  // namespace

FittingSet::FittingSet(int dimension, std::vector<FittingPoint> points)
    : dimension_(dimension), points_(std::move(points)) {
    if (dimension_ <= 0) throw std::invalid_argument("FittingSet: dimension must be positive");
    if (points_.empty()) throw std::invalid_argument("FittingSet: no fitting points");
    for (const auto& p : points_) check_scenario(p.x, dimension_, "FittingSet");
}

std::vector<double> FittingSet::responses() const {
    std::vector<double> y(points_.size());
    for (std::size_t i = 0; i < points_.size(); ++i) y[i] = points_[i].y;
    return y;
}

ValidationSet::ValidationSet(int dimension, std::vector<ValidationPoint> points,
                             std::optional<BasePoint> base)
    : dimension_(dimension), points_(std::move(points)), base_(std::move(base)) {
    if (dimension_ <= 0) throw std::invalid_argument("ValidationSet: dimension must be positive");
    std::size_t with_asset = 0;
    for (const auto& p : points_) {
        check_scenario(p.x, dimension_, "ValidationSet");
        if (p.asset) ++with_asset;
    }
    if (with_asset != 0 && with_asset != points_.size())
        throw std::invalid_argument("ValidationSet: asset values present for some points only");
    has_assets_ = !points_.empty() && with_asset == points_.size();
    if (base_) check_scenario(base_->x, dimension_, "ValidationSet base");
}

EconomicVariableLabel EconomicVariableLabel::parse(const std::string& s) {
    if (s == "BEL" || s == "bel") return {Kind::bel, "BEL"};
    if (s == "AC" || s == "ac") return {Kind::ac, "AC"};
    return {Kind::other, s};
}

std::string EconomicVariableLabel::to_string() const {
    switch (kind) {
        case Kind::bel: return "BEL";
        case Kind::ac: return "AC";
        default: return text;
    }
}

}  // namespace proxima
