#include "proxima/basis.hpp"

#include <algorithm>
#include <numeric>
#include <set>
#include <sstream>

namespace proxima {

int BasisTerm::degree() const {
    return std::accumulate(exponents.begin(), exponents.end(), 0);
}

double BasisTerm::evaluate(const Scenario& x) const {
    double v = 1.0;
    for (std::size_t d = 0; d < exponents.size(); ++d) {
        const double xd = x[d];
        for (int r = 0; r < exponents[d]; ++r) v *= xd;
    }
    return v;
}

std::string BasisTerm::to_string() const {
    std::ostringstream os;
    os << "(";
    for (std::size_t d = 0; d < exponents.size(); ++d) {
        if (d) os << ",";
        os << exponents[d];
    }
    os << ")";
    return os.str();
}

Restrictions Restrictions::parse(const std::string& text) {
    const auto dash = text.find('-');
    if (dash == std::string::npos || dash == 0 || dash + 4 != text.size())
        throw std::invalid_argument("restriction setting must look like '<Kmax>-<d1><d2><d3>': " + text);
    Restrictions r;
    r.k_max = std::stoi(text.substr(0, dash));
    for (int i = 0; i < 3; ++i) {
        const char c = text[dash + 1 + i];
        if (c < '0' || c > '9')
            throw std::invalid_argument("restriction digits must be 0-9: " + text);
        (i == 0 ? r.d1 : i == 1 ? r.d2 : r.d3) = c - '0';
    }
    r.validate();
    return r;
}

std::string Restrictions::to_string() const {
    std::ostringstream os;
    os << k_max << "-" << d1 << d2 << d3;
    return os.str();
}

void Restrictions::validate() const {
    if (k_max < 1) throw std::invalid_argument("restrictions: k_max must be >= 1");
    if (!(d3 <= d1 && d1 <= d2))
        throw std::invalid_argument("restrictions: require d3 <= d1 <= d2");
}

bool admissible(const BasisTerm& term, const Restrictions& r) {
    int total = 0, positive = 0, max_exp = 0;
    for (int e : term.exponents) {
        total += e;
        if (e > 0) ++positive;
        max_exp = std::max(max_exp, e);
    }
    if (max_exp > r.d1 || total > r.d2) return false;
    if (positive >= 2)
        for (int e : term.exponents)
            if (e > r.d3) return false;
    return true;
}

std::vector<BasisTerm> marginality_candidates(const std::vector<BasisTerm>& current,
                                              const Restrictions& r, int dimension) {
    const std::set<BasisTerm> have(current.begin(), current.end());
    if (!have.count(BasisTerm::intercept(dimension)))
        throw std::invalid_argument("marginality_candidates: current set must contain the intercept");

    // Every candidate is some current term with one exponent raised, so it is
    // enough to enumerate those and check the full derivative closure.
    std::set<BasisTerm> out;
    for (const auto& t : current) {
        for (int d = 0; d < dimension; ++d) {
            BasisTerm cand = t;
            ++cand.exponents[d];
            if (have.count(cand) || out.count(cand) || !admissible(cand, r)) continue;
            bool closed = true;
            for (int j = 0; j < dimension && closed; ++j) {
                if (cand.exponents[j] == 0) continue;
                BasisTerm deriv = cand;
                --deriv.exponents[j];
                closed = have.count(deriv) != 0;
            }
            if (closed) out.insert(std::move(cand));
        }
    }
    return {out.begin(), out.end()};
}

namespace {

void enumerate_terms(const Restrictions& r, int dimension, int dim, BasisTerm& work,
                     std::vector<BasisTerm>& out) {
    if (dim == dimension) {
        if (admissible(work, r)) out.push_back(work);
        return;
    }
    for (int e = 0; e <= r.d1; ++e) {
        work.exponents[dim] = e;
        if (work.degree() > r.d2) {
            work.exponents[dim] = 0;
            break;
        }
        enumerate_terms(r, dimension, dim + 1, work, out);
        work.exponents[dim] = 0;
    }
}

}  // namespace

std::vector<BasisTerm> admissible_universe(const Restrictions& r, int dimension) {
    BasisTerm work = BasisTerm::intercept(dimension);
    std::vector<BasisTerm> out;
    enumerate_terms(r, dimension, 0, work, out);
    std::sort(out.begin(), out.end());
    return out;
}

Eigen::MatrixXd design_matrix(const std::vector<BasisTerm>& terms,
                              const std::vector<FittingPoint>& points) {
    Eigen::MatrixXd z(points.size(), terms.size());
    for (std::size_t i = 0; i < points.size(); ++i)
        for (std::size_t k = 0; k < terms.size(); ++k)
            z(i, k) = terms[k].evaluate(points[i].x);
    return z;
}

Eigen::MatrixXd design_matrix(const std::vector<BasisTerm>& terms,
                              const std::vector<Scenario>& scenarios) {
    Eigen::MatrixXd z(scenarios.size(), terms.size());
    for (std::size_t i = 0; i < scenarios.size(); ++i)
        for (std::size_t k = 0; k < terms.size(); ++k)
            z(i, k) = terms[k].evaluate(scenarios[i]);
    return z;
}

Eigen::VectorXd response_vector(const FittingSet& fit_set) {
    Eigen::VectorXd y(fit_set.size());
    for (std::size_t i = 0; i < fit_set.size(); ++i) y(i) = fit_set.response(i);
    return y;
}

Eigen::RowVectorXd design_row(const std::vector<BasisTerm>& terms, const Scenario& x) {
    Eigen::RowVectorXd z(terms.size());
    for (std::size_t k = 0; k < terms.size(); ++k) z(k) = terms[k].evaluate(x);
    return z;
}

}  // namespace proxima
