#include "proxima/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace proxima {

namespace {

std::string trim(const std::string& s) {
    auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, sep)) out.push_back(trim(item));
    return out;
}

}  // namespace

RunConfig RunConfig::from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file: " + path);
    RunConfig config;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto hash = line.find_first_of("#;");
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error(path + ": expected 'key = value' at line " +
                                     std::to_string(line_no));
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty())
            throw std::runtime_error(path + ": empty key at line " + std::to_string(line_no));
        config.values_[key] = value;
    }
    return config;
}

void RunConfig::apply_override(const std::string& assignment) {
    const auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw std::invalid_argument("--set expects key=value, got '" + assignment + "'");
    values_[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

std::string RunConfig::get(const std::string& key, const std::string& fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : it->second;
}

std::string RunConfig::require(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw std::runtime_error("config key required: " + key);
    return it->second;
}

int RunConfig::get_int(const std::string& key, int fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : std::stoi(it->second);
}

double RunConfig::get_double(const std::string& key, double fallback) const {
    const auto it = values_.find(key);
    return it == values_.end() ? fallback : std::stod(it->second);
}

bool RunConfig::get_bool(const std::string& key, bool fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    if (it->second == "true" || it->second == "1" || it->second == "yes") return true;
    if (it->second == "false" || it->second == "0" || it->second == "no") return false;
    throw std::runtime_error("config key " + key + ": expected a boolean, got '" + it->second + "'");
}

std::vector<double> RunConfig::get_doubles(const std::string& key,
                                           const std::vector<double>& fallback) const {
    const auto it = values_.find(key);
    if (it == values_.end()) return fallback;
    std::vector<double> out;
    for (const auto& tok : split(it->second, ','))
        if (!tok.empty()) out.push_back(std::stod(tok));
    return out;
}

EngineConfig engine_config_from(const RunConfig& config, int dimension, int threads) {
    EngineConfig engine;
    engine.method = parse_method(config.require("run.method"));
    engine.restrictions = Restrictions::parse(config.get("restriction", "20-443"));
    engine.mode = parse_selection_mode(config.get("selection.mode", "stepwise"));
    engine.stage_length = config.get_int("selection.stage_length", 5);
    engine.proportion = config.get_double("selection.proportion", 0.25);
    engine.threads = threads;

    switch (engine.method) {
        case Method::glm:
            engine.family = parse_family(config.get("glm.family", "gaussian"));
            engine.link = parse_link(config.get("glm.link", "identity"));
            engine.glm.tol = config.get_double("glm.tol", engine.glm.tol);
            engine.glm.max_iter = config.get_int("glm.max_iter", engine.glm.max_iter);
            break;
        case Method::gam:
            engine.family = parse_family(config.get("gam.family", "gaussian"));
            engine.link = parse_link(config.get("gam.link", "identity"));
            engine.gam.spline_count = config.get_int("gam.splines_per_smooth", 8);
            engine.gam_lambda_grid = config.get_doubles("gam.lambda_grid", engine.gam_lambda_grid);
            engine.gam_criterion = parse_gam_criterion(config.get("gam.criterion", "gcv"));
            break;
        case Method::fgls: {
            engine.fgls_m_max = config.get_int("fgls.m_max", 6);
            const std::string variant = config.get("fgls.variant", "type2");
            if (variant == "type1")
                engine.fgls_variant = 1;
            else if (variant == "type2")
                engine.fgls_variant = 2;
            else
                throw std::runtime_error("fgls.variant must be type1 or type2, got '" + variant +
                                         "'");
            engine.fgls.tol = config.get_double("fgls.tol", engine.fgls.tol);
            engine.fgls.max_iter = config.get_int("fgls.max_iter", engine.fgls.max_iter);
            break;
        }
        case Method::mars:
            engine.family = parse_family(config.get("mars.family", "gaussian"));
            engine.link = parse_link(config.get("mars.link", "identity"));
            if (config.has("mars.k_max")) engine.restrictions.k_max = config.get_int("mars.k_max", 0);
            engine.mars.t_min = config.get_double("mars.t_min", engine.mars.t_min);
            engine.mars.max_order = config.get_int("mars.degree", engine.mars.max_order);
            engine.mars.knot_cap = config.get_int("mars.knot_cap", engine.mars.knot_cap);
            {
                const std::string prune = config.get("mars.prune", "backward");
                if (prune == "backward")
                    engine.mars.prune = true;
                else if (prune == "none")
                    engine.mars.prune = false;
                else
                    throw std::runtime_error("mars.prune must be none or backward, got '" + prune +
                                             "'");
            }
            engine.mars.gcv_c = config.get_double("mars.gcv_c", engine.mars.gcv_c);
            break;
        case Method::kernel: {
            engine.kernel_spec.shape = parse_kernel_shape(config.get("kernel.shape", "gaussian"));
            engine.kernel_spec.order = config.get_int("kernel.order", 2);
            if (engine.kernel_spec.order != 2 && engine.kernel_spec.order != 4)
                throw std::runtime_error("kernel.order must be 2 or 4");
            engine.kernel_mode = parse_kernel_mode(config.get("kernel.mode", "lc"));
            engine.kernel_bw.criterion =
                parse_bandwidth_criterion(config.get("kernel.selector", "loocv"));
            engine.kernel_bw.bw_fraction = config.get_double("kernel.bw_fraction", 1.0);
            const std::string basis = config.require("kernel.basis");
            const auto colon = basis.find(':');
            if (colon == std::string::npos) {
                engine.kernel_basis = basis;
            } else {
                engine.kernel_basis = basis.substr(0, colon);
                engine.kernel_basis_kmax = std::stoi(basis.substr(colon + 1));
            }
            break;
        }
        default:
            break;
    }
    (void)dimension;
    return engine;
}

SyntheticModelSpec synthetic_spec_from(const RunConfig& config) {
    SyntheticModelSpec spec;
    spec.dimension = config.get_int("synthetic.d", 5);
    spec.seed = static_cast<std::uint64_t>(config.get_int("synthetic.seed", 1));
    spec.asymmetry = config.get_double("synthetic.asymmetry", 0.0);

    // beta entries look like "e1 e2 ... eD : coeff", separated by ';'
    const std::string beta_text = config.require("synthetic.beta");
    std::stringstream entries(beta_text);
    std::string entry;
    while (std::getline(entries, entry, ';')) {
        entry = trim(entry);
        if (entry.empty()) continue;
        const auto colon = entry.find(':');
        if (colon == std::string::npos)
            throw std::runtime_error("synthetic.beta entries need 'exponents : coeff', got '" +
                                     entry + "'");
        std::istringstream exps(entry.substr(0, colon));
        BasisTerm term;
        int e;
        while (exps >> e) term.exponents.push_back(e);
        if (term.dimension() != spec.dimension)
            throw std::runtime_error("synthetic.beta: term '" + entry + "' needs D exponents");
        spec.terms.push_back(std::move(term));
        spec.beta.push_back(std::stod(entry.substr(colon + 1)));
    }

    auto read_vector = [&](const std::string& key, std::size_t expected,
                           std::vector<double> fallback) {
        std::vector<double> v = config.get_doubles(key, fallback);
        if (v.size() != expected)
            throw std::runtime_error("config key " + key + " needs " + std::to_string(expected) +
                                     " comma-separated entries");
        return v;
    };
    spec.loss_direction = read_vector("synthetic.loss_direction", spec.dimension,
                                      std::vector<double>(spec.dimension, 0.0));
    std::vector<double> default_gamma(spec.dimension + 1, 0.0);
    spec.gamma = read_vector("synthetic.gamma", spec.dimension + 1, default_gamma);
    spec.asset_base = config.get_double("synthetic.asset_base", 0.0);
    if (spec.asset_base != 0.0)
        spec.asset_tilt = read_vector("synthetic.asset_tilt", spec.dimension,
                                      std::vector<double>(spec.dimension, 0.0));
    spec.validate();
    return spec;
}

}  // namespace proxima
