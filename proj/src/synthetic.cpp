#include "proxima/synthetic.hpp"

#include <cmath>
#include <numbers>
#include <set>
#include <stdexcept>

#include "proxima/special.hpp"

namespace proxima {

namespace {

constexpr double kPairCorrelation = -0.5;

// Deterministic normal generator (Box-Muller over a 53-bit uniform) so that
// generated sets are bit-identical for a fixed seed on any platform.
class NormalSource {
  public:
    explicit NormalSource(std::uint64_t seed) : state_(seed ? seed : 0x9e3779b97f4a7c15ull) {}

    double uniform() {
        // splitmix64
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ull);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ull;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebull;
        z ^= z >> 31;
        const double u = static_cast<double>(z >> 11) * 0x1.0p-53;
        return u > 0.0 ? u : 0x1.0p-53;
    }

    void normal_pair(double& z1, double& z2) {
        const double r = std::sqrt(-2.0 * std::log(uniform()));
        const double t = 2.0 * std::numbers::pi * uniform();
        z1 = r * std::cos(t);
        z2 = r * std::sin(t);
    }

    double normal() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        double z1, z2;
        normal_pair(z1, z2);
        spare_ = z2;
        have_spare_ = true;
        return z1;
    }

  private:
    std::uint64_t state_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

// Mean of inner_sims antithetic draws from N(0, sigma2).
double noise_mean(NormalSource& rng, double sigma2, int inner_sims) {
    const double sigma = std::sqrt(sigma2);
    const double rho = kPairCorrelation;
    const double mix = std::sqrt(1.0 - rho * rho);
    double acc = 0.0;
    int produced = 0;
    while (produced + 2 <= inner_sims) {
        const double z = rng.normal();
        const double w = rng.normal();
        acc += sigma * z + sigma * (rho * z + mix * w);
        produced += 2;
    }
    if (produced < inner_sims) acc += sigma * rng.normal();
    return acc / inner_sims;
}

double linear_functional(const std::vector<double>& coeffs, const Scenario& x) {
    double v = 0.0;
    for (std::size_t d = 0; d < coeffs.size(); ++d) v += coeffs[d] * x[d];
    return v;
}

}  // namespace

void SyntheticModelSpec::validate() const {
    if (dimension < 1) throw std::invalid_argument("synthetic spec: dimension must be positive");
    if (terms.size() != beta.size())
        throw std::invalid_argument("synthetic spec: one coefficient per term required");
    std::set<BasisTerm> have(terms.begin(), terms.end());
    for (const auto& t : terms) {
        if (t.dimension() != dimension)
            throw std::invalid_argument("synthetic spec: term dimension mismatch");
        for (int d = 0; d < dimension; ++d) {
            if (t.exponents[d] == 0) continue;
            BasisTerm deriv = t;
            --deriv.exponents[d];
            if (!have.count(deriv))
                throw std::invalid_argument("synthetic spec: term set not downward closed at " +
                                            t.to_string());
        }
    }
    if (static_cast<int>(loss_direction.size()) != dimension)
        throw std::invalid_argument("synthetic spec: loss direction needs D entries");
    if (static_cast<int>(gamma.size()) != dimension + 1)
        throw std::invalid_argument("synthetic spec: gamma needs D+1 entries");
    if (asymmetry < 0) throw std::invalid_argument("synthetic spec: asymmetry must be >= 0");
    if (asset_base != 0.0 && static_cast<int>(asset_tilt.size()) != dimension)
        throw std::invalid_argument("synthetic spec: asset tilt needs D entries");
}

double true_value(const SyntheticModelSpec& spec, const Scenario& x) {
    double v = 0.0;
    for (std::size_t k = 0; k < spec.terms.size(); ++k) v += spec.beta[k] * spec.terms[k].evaluate(x);
    if (spec.asymmetry > 0.0) v += spec.asymmetry * softplus(-linear_functional(spec.loss_direction, x));
    return v;
}

double noise_variance(const SyntheticModelSpec& spec, const Scenario& x) {
    return std::exp(spec.gamma[0] + linear_functional({spec.gamma.begin() + 1, spec.gamma.end()}, x));
}

FittingSet make_fitting_set(const SyntheticModelSpec& spec, const std::vector<Scenario>& scenarios,
                            int inner_sims) {
    spec.validate();
    if (inner_sims < 1) throw std::invalid_argument("make_fitting_set: inner_sims must be >= 1");
    NormalSource rng(spec.seed);
    std::vector<FittingPoint> points;
    points.reserve(scenarios.size());
    for (const auto& x : scenarios) {
        FittingPoint p;
        p.x = x;
        p.y = true_value(spec, x) + noise_mean(rng, noise_variance(spec, x), inner_sims);
        points.push_back(std::move(p));
    }
    return FittingSet(spec.dimension, std::move(points));
}

ValidationSet make_validation_set(const SyntheticModelSpec& spec,
                                  const std::vector<Scenario>& scenarios, int inner_sims,
                                  bool with_base) {
    spec.validate();
    if (inner_sims < 1) throw std::invalid_argument("make_validation_set: inner_sims must be >= 1");
    NormalSource rng(spec.seed);
    std::vector<ValidationPoint> points;
    points.reserve(scenarios.size());
    for (const auto& x : scenarios) {
        ValidationPoint p;
        p.x = x;
        p.y = true_value(spec, x) + noise_mean(rng, noise_variance(spec, x), inner_sims);
        if (spec.asset_base != 0.0)
            p.asset = spec.asset_base * (1.0 + linear_functional(spec.asset_tilt, x));
        points.push_back(std::move(p));
    }
    std::optional<BasePoint> base;
    if (with_base) {
        const Scenario x0(spec.dimension, 0.0);
        BasePoint b;
        b.x = x0;
        b.y = true_value(spec, x0) + noise_mean(rng, noise_variance(spec, x0), inner_sims);
        base = std::move(b);
    }
    return ValidationSet(spec.dimension, std::move(points), std::move(base));
}

}  // namespace proxima
