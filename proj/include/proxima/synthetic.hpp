#pragma once

#include <cstdint>
#include <vector>

#include "proxima/basis.hpp"
#include "proxima/types.hpp"

namespace proxima {

// Ground truth standing in for the cash-flow-projection model: a polynomial
// over a downward-closed term set plus a soft-plus kink that makes losses
// grow one-sidedly, with multiplicative-heteroscedastic inner-simulation
// noise.
struct SyntheticModelSpec {
    int dimension = 5;
    std::vector<BasisTerm> terms;
    std::vector<double> beta;
    double asymmetry = 0.0;              // soft-plus strength a
    std::vector<double> loss_direction;  // the linear functional inside the kink
    std::vector<double> gamma;           // D+1 log-variance coefficients over (1, x)
    std::uint64_t seed = 1;
    double asset_base = 0.0;             // 0: no asset column emitted
    std::vector<double> asset_tilt;

    void validate() const;  // term set downward closed, sizes consistent
};

double true_value(const SyntheticModelSpec& spec, const Scenario& x);
double noise_variance(const SyntheticModelSpec& spec, const Scenario& x);  // exp(gamma^T (1,x))

// Inner-simulation noise comes in antithetic pairs: jointly normal draws
// with the marginal N(0, exp(gamma^T v)) and pair correlation -1/2, so pair
// means beat independent pairs without collapsing the noise the way exact
// mirroring would. An odd count leaves the last draw unpaired.
FittingSet make_fitting_set(const SyntheticModelSpec& spec, const std::vector<Scenario>& scenarios,
                            int inner_sims);

ValidationSet make_validation_set(const SyntheticModelSpec& spec,
                                  const std::vector<Scenario>& scenarios, int inner_sims,
                                  bool with_base);

}  // namespace proxima
