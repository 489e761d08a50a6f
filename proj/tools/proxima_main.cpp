// proxima: generate synthetic fitting/validation data, calibrate proxy
// functions with the adaptive engine, and evaluate out-of-sample figures.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "proxima/config.hpp"
#include "proxima/csv.hpp"
#include "proxima/engine.hpp"
#include "proxima/parallel.hpp"
#include "proxima/proxy_model.hpp"
#include "proxima/sobol.hpp"
#include "proxima/validation.hpp"

namespace {

using namespace proxima;

int resolve_threads(int flag_value) {
    if (flag_value > 0) return flag_value;
    if (const char* env = std::getenv("PROXIMA_THREADS")) {
        const int n = std::atoi(env);
        if (n > 0) return n;
    }
    return hardware_threads();
}

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write file: " + path);
    out << text;
}

std::vector<std::pair<std::string, std::string>> parse_named_paths(const std::string& text) {
    std::vector<std::pair<std::string, std::string>> out;
    std::stringstream ss(text);
    std::string entry;
    while (std::getline(ss, entry, ',')) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos)
            throw std::runtime_error("expected name=path entries, got '" + entry + "'");
        out.emplace_back(entry.substr(0, eq), entry.substr(eq + 1));
    }
    if (out.empty()) throw std::runtime_error("no validation sets given");
    return out;
}

int cmd_generate(const RunConfig& config) {
    SyntheticModelSpec spec = synthetic_spec_from(config);
    const int n_fit = config.get_int("generate.n_fit", 2000);
    const int inner_fit = config.get_int("generate.inner_fit", 1);
    const int n_val = config.get_int("generate.n_val", 50);
    const int inner_val = config.get_int("generate.inner_val", 1000);
    const bool with_base = config.get_bool("generate.with_base", true);
    const std::string fitting_path = config.require("io.fitting");

    SobolGenerator sobol(spec.dimension);
    auto take = [&](int n) {
        std::vector<Scenario> pts;
        pts.reserve(n);
        for (int i = 0; i < n; ++i) {
            Scenario x = sobol.next_unit();
            for (double& v : x) v = 2.0 * v - 1.0;
            pts.push_back(std::move(x));
        }
        return pts;
    };

    const FittingSet fitting = make_fitting_set(spec, take(n_fit), inner_fit);
    write_fitting_csv(fitting, fitting_path);
    std::cout << "wrote " << fitting.size() << " fitting points to " << fitting_path << "\n";

    int files = 1;
    std::stringstream sets(config.get("generate.sets", "sobol"));
    std::string name;
    int set_index = 0;
    while (std::getline(sets, name, ',')) {
        SyntheticModelSpec vspec = spec;
        vspec.seed = spec.seed + 1 + set_index;
        const ValidationSet vset = make_validation_set(vspec, take(n_val), inner_val, with_base);
        const std::string path = config.get("io.out_dir", ".") + "/" + name + ".csv";
        write_validation_csv(vset, path);
        std::cout << "wrote " << vset.size() << " validation points to " << path << "\n";
        ++files;
        ++set_index;
    }
    std::cout << files << " files written\n";
    return 0;
}

int cmd_calibrate(const RunConfig& config, int threads) {
    const std::string fitting_path = config.require("io.fitting");
    const FittingSet fitting = read_fitting_csv(fitting_path);
    EngineConfig engine = engine_config_from(config, fitting.dimension(), threads);
    engine.kernel_data_path = fitting_path;

    CalibrationResult result;
    if (engine.method == Method::fgls) {
        result = run_fgls(fitting, engine).final_run;
    } else {
        result = calibrate(fitting, engine);
    }

    const std::string model_path = config.require("io.model");
    result.model.write(model_path);
    std::cout << "model written to " << model_path << "\n";

    if (config.has("io.trace")) {
        write_text(config.require("io.trace"), result.trace.to_csv());
        std::cout << "trace written to " << config.require("io.trace") << " ("
                  << result.trace.iterations.size() << " iterations)\n";
    }
    return 0;
}

int cmd_validate(const RunConfig& config) {
    const ProxyModel model = ProxyModel::read(config.require("io.model"));
    const auto named = parse_named_paths(config.require("validate.sets"));

    std::vector<ValidationSet> sets;
    sets.reserve(named.size());
    for (const auto& [name, path] : named) sets.push_back(read_validation_csv(path));

    std::vector<NamedModel> models{{config.get("run.model_name", "model"), &model}};
    std::vector<NamedValidationSet> views;
    for (std::size_t i = 0; i < named.size(); ++i) views.push_back({named[i].first, &sets[i]});

    const std::string text = report(models, views);
    const std::string report_path = config.require("io.report");
    write_text(report_path, text);
    std::cout << text;
    std::cout << "report written to " << report_path << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"least-squares Monte Carlo proxy calibration toolkit"};
    app.require_subcommand(1);

    std::string config_path;
    std::vector<std::string> overrides;
    int threads = 0;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "run configuration file")->required();
        sub->add_option("--set", overrides, "override a config key (key=value)");
        sub->add_option("--threads", threads, "worker thread cap");
    };
    CLI::App* generate = app.add_subcommand("generate", "emit synthetic fitting/validation CSVs");
    CLI::App* calibrate_cmd = app.add_subcommand("calibrate", "run the adaptive calibration");
    CLI::App* validate = app.add_subcommand("validate", "compute out-of-sample figures");
    add_common(generate);
    add_common(calibrate_cmd);
    add_common(validate);

    CLI11_PARSE(app, argc, argv);

    try {
        RunConfig config = RunConfig::from_file(config_path);
        for (const auto& o : overrides) config.apply_override(o);
        if (generate->parsed()) return cmd_generate(config);
        if (calibrate_cmd->parsed()) return cmd_calibrate(config, resolve_threads(threads));
        if (validate->parsed()) return cmd_validate(config);
    } catch (const std::exception& e) {
        std::cerr << "proxima: " << e.what() << "\n";
        return 1;
    }
    return 2;
}
