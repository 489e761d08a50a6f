#pragma once

#include <cstdint>
#include <vector>

#include "proxima/types.hpp"

namespace proxima {

// Gray-code Sobol sequence with Joe-Kuo direction numbers, dimensions up to
// 21. The generator starts past the all-zero index-0 point, so the first
// point drawn is (0.5, ..., 0.5).
class SobolGenerator {
  public:
    explicit SobolGenerator(int dimension);

    static constexpr int max_dimension = 21;

    int dimension() const { return dimension_; }
    std::uint64_t index() const { return index_; }

    Scenario next_unit();  // next point in [0,1)^D

    // n points mapped affinely onto [-1,1]^D.
    static std::vector<Scenario> points(int dimension, int n);

  private:
    int dimension_ = 0;
    std::uint64_t index_ = 0;
    std::vector<std::uint32_t> state_;
    std::vector<std::vector<std::uint32_t>> directions_;  // [dim][bit]
};

}  // namespace proxima
