#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "proxima/engine.hpp"
#include "proxima/synthetic.hpp"

namespace proxima {

// Flat key-value configuration: lines of "section.key = value", '#' or ';'
// comments, later duplicates win. --set overrides stack on top.
class RunConfig {
  public:
    static RunConfig from_file(const std::string& path);

    void set(const std::string& key, const std::string& value) { values_[key] = value; }
    void apply_override(const std::string& assignment);  // "key=value"

    bool has(const std::string& key) const { return values_.count(key) != 0; }
    std::string get(const std::string& key, const std::string& fallback) const;
    std::string require(const std::string& key) const;
    int get_int(const std::string& key, int fallback) const;
    double get_double(const std::string& key, double fallback) const;
    bool get_bool(const std::string& key, bool fallback) const;
    std::vector<double> get_doubles(const std::string& key,
                                    const std::vector<double>& fallback) const;

    const std::map<std::string, std::string>& values() const { return values_; }

  private:
    std::map<std::string, std::string> values_;
};

// Assembles the engine configuration from the config keys (run.method,
// restriction, selection.*, per-method sections).
EngineConfig engine_config_from(const RunConfig& config, int dimension, int threads);

// Parses the synthetic.* section.
SyntheticModelSpec synthetic_spec_from(const RunConfig& config);

}  // namespace proxima
