#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "proxima/basis.hpp"
#include "proxima/types.hpp"

namespace test_util {

// Deterministic scenarios in [-1,1]^D.
inline std::vector<proxima::Scenario> random_scenarios(int dimension, int n, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::vector<proxima::Scenario> out(n, proxima::Scenario(dimension));
    for (auto& x : out)
        for (double& v : x) v = uni(rng);
    return out;
}

inline proxima::BasisTerm term(std::vector<int> exponents) {
    return proxima::BasisTerm(std::move(exponents));
}

// y = beta^T e(x) + N(0, sigma^2) over the given terms.
inline proxima::FittingSet linear_data(const std::vector<proxima::BasisTerm>& terms,
                                       const std::vector<double>& beta, int n, double sigma,
                                       std::uint64_t seed) {
    const int d = terms.front().dimension();
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> uni(-1.0, 1.0);
    std::normal_distribution<double> noise(0.0, sigma);
    std::vector<proxima::FittingPoint> points(n);
    for (auto& p : points) {
        p.x.resize(d);
        for (double& v : p.x) v = uni(rng);
        p.y = 0.0;
        for (std::size_t k = 0; k < terms.size(); ++k) p.y += beta[k] * terms[k].evaluate(p.x);
        if (sigma > 0) p.y += noise(rng);
    }
    return proxima::FittingSet(d, std::move(points));
}

class TempDir {
  public:
    explicit TempDir(const std::string& tag) {
        path_ = std::filesystem::temp_directory_path() / ("proxima_test_" + tag);
        std::filesystem::create_directories(path_);
    }
    ~TempDir() { std::filesystem::remove_all(path_); }
    std::string file(const std::string& name) const { return (path_ / name).string(); }

  private:
    std::filesystem::path path_;
};

}  // namespace test_util
