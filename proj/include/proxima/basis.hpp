#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "proxima/types.hpp"

namespace proxima {

// A monomial basis function, represented by its exponent tuple
// (r_1,...,r_D). The all-zero tuple is the intercept.
struct BasisTerm {
    std::vector<int> exponents;

    BasisTerm() = default;
    explicit BasisTerm(std::vector<int> e) : exponents(std::move(e)) {}
    static BasisTerm intercept(int dimension) { return BasisTerm(std::vector<int>(dimension, 0)); }

    int dimension() const { return static_cast<int>(exponents.size()); }
    int degree() const;
    bool is_intercept() const { return degree() == 0; }
    double evaluate(const Scenario& x) const;  // 0^0 = 1
    std::string to_string() const;

    auto operator<=>(const BasisTerm&) const = default;
};

// Restriction setting Kmax-d1d2d3: caps on term count, per-exponent size,
// total degree, and exponents inside interaction terms.
struct Restrictions {
    int k_max = 0;
    int d1 = 0;
    int d2 = 0;
    int d3 = 0;

    // Parses e.g. "150-443" as k_max=150, d1=4, d2=4, d3=3.
    static Restrictions parse(const std::string& text);
    std::string to_string() const;
    void validate() const;  // d3 <= d1 <= d2
};

bool admissible(const BasisTerm& term, const Restrictions& r);

// Candidate terms under the principle of marginality: every admissible term
// not in `current` whose derivatives (each exponent decremented once) are all
// members of `current`. Lexicographically ordered on the exponent tuple.
// `current` must contain the intercept.
std::vector<BasisTerm> marginality_candidates(const std::vector<BasisTerm>& current,
                                              const Restrictions& r, int dimension);

// All admissible terms under r (ignoring k_max), lexicographically ordered.
std::vector<BasisTerm> admissible_universe(const Restrictions& r, int dimension);

// Entry (i,k) = e_k(x^i).
Eigen::MatrixXd design_matrix(const std::vector<BasisTerm>& terms,
                              const std::vector<FittingPoint>& points);
Eigen::VectorXd response_vector(const FittingSet& fit_set);
Eigen::MatrixXd design_matrix(const std::vector<BasisTerm>& terms,
                              const std::vector<Scenario>& scenarios);
Eigen::RowVectorXd design_row(const std::vector<BasisTerm>& terms, const Scenario& x);

}  // namespace proxima
