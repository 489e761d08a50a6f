#include "proxima/sobol.hpp"

#include <bit>
#include <stdexcept>

namespace proxima {

namespace {

constexpr int kBits = 32;

// Joe-Kuo initializers (new-joe-kuo-6) for dimensions 2..21: polynomial
// degree s, interior polynomial bits a, and initial direction values m.
struct DirectionSeed {
    int s;
    std::uint32_t a;
    std::uint32_t m[7];
};

constexpr DirectionSeed kSeeds[20] = {
    {1, 0, {1}},
    {2, 1, {1, 3}},
    {3, 1, {1, 3, 1}},
    {3, 2, {1, 1, 1}},
    {4, 1, {1, 1, 3, 3}},
    {4, 4, {1, 3, 5, 13}},
    {5, 2, {1, 1, 5, 5, 17}},
    {5, 4, {1, 1, 5, 5, 5}},
    {5, 7, {1, 1, 7, 11, 19}},
    {5, 11, {1, 1, 5, 1, 1}},
    {5, 13, {1, 1, 1, 3, 11}},
    {5, 14, {1, 3, 5, 5, 31}},
    {6, 1, {1, 3, 3, 9, 7, 49}},
    {6, 13, {1, 1, 1, 15, 21, 21}},
    {6, 16, {1, 3, 1, 13, 27, 49}},
    {6, 19, {1, 1, 1, 15, 7, 5}},
    {6, 22, {1, 3, 1, 15, 13, 25}},
    {6, 25, {1, 1, 5, 5, 19, 61}},
    {7, 1, {1, 3, 7, 11, 23, 15, 103}},
    {7, 4, {1, 3, 7, 13, 13, 15, 69}},
};

}  // namespace

SobolGenerator::SobolGenerator(int dimension) : dimension_(dimension) {
    if (dimension < 1 || dimension > max_dimension)
        throw std::invalid_argument("SobolGenerator: dimension must lie in 1..21");
    state_.assign(dimension, 0);
    directions_.resize(dimension);

    // First dimension: van der Corput, all m = 1.
    directions_[0].resize(kBits);
    for (int i = 0; i < kBits; ++i) directions_[0][i] = 1u << (kBits - 1 - i);

    for (int d = 1; d < dimension; ++d) {
        const DirectionSeed& seed = kSeeds[d - 1];
        auto& v = directions_[d];
        v.resize(kBits);
        for (int i = 0; i < seed.s; ++i) v[i] = seed.m[i] << (kBits - 1 - i);
        for (int i = seed.s; i < kBits; ++i) {
            v[i] = v[i - seed.s] ^ (v[i - seed.s] >> seed.s);
            for (int k = 1; k < seed.s; ++k)
                if ((seed.a >> (seed.s - 1 - k)) & 1u) v[i] ^= v[i - k];
        }
    }
}

Scenario SobolGenerator::next_unit() {
    // Gray-code update: flip the direction of the lowest zero bit of the
    // running index.
    const int bit = std::countr_one(index_);
    if (bit >= kBits) throw std::runtime_error("SobolGenerator: sequence exhausted");
    ++index_;
    Scenario x(dimension_);
    for (int d = 0; d < dimension_; ++d) {
        state_[d] ^= directions_[d][bit];
        x[d] = static_cast<double>(state_[d]) / 4294967296.0;  // 2^32
    }
    return x;
}

std::vector<Scenario> SobolGenerator::points(int dimension, int n) {
    if (n < 1) throw std::invalid_argument("SobolGenerator::points: n must be >= 1");
    SobolGenerator gen(dimension);
    std::vector<Scenario> out;
    out.reserve(n);
    for (int i = 0; i < n; ++i) {
        Scenario x = gen.next_unit();
        for (double& v : x) v = 2.0 * v - 1.0;
        out.push_back(std::move(x));
    }
    return out;
}

}  // namespace proxima
