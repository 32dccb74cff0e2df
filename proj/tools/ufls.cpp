#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "ufls/scenario.hpp"

namespace fs = std::filesystem;

namespace {

constexpr int kExitConfig = 2;
constexpr int kExitFault = 3;

fs::path output_root(const std::string& out) {
    if (!out.empty()) return out;
    if (const char* env = std::getenv("UFLS_OUT"); env && *env) return env;
    return "runs";
}

int execute(const ufls::ScenarioConfig& cfg, const std::string& out, bool plot) {
    const fs::path dir = output_root(out) / cfg.name;
    ufls::RunResult r = ufls::run_scenario(cfg);
    ufls::write_artifacts(r, dir, plot);
    std::cout << "wrote " << dir.string() << "\n" << ufls::summarize_run_dir(dir);
    if (!r.summary.error.empty()) {
        std::cerr << "ufls: " << r.summary.error << "\n";
        return kExitFault;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Proactive underfrequency load shedding simulator"};
    app.require_subcommand(1);

    std::string config_file, out, preset_name, run_dir;
    std::optional<std::uint64_t> seed_noise, seed_filter;
    bool plot = false;

    auto* run = app.add_subcommand("run", "Run a scenario from a JSON config file");
    run->add_option("config-file", config_file, "Scenario config")->required();
    run->add_option("--seed-noise", seed_noise, "Override the measurement noise seed");
    run->add_option("--seed-filter", seed_filter, "Override the particle filter seed");
    run->add_option("--out", out, "Output root (default $UFLS_OUT or ./runs)");
    run->add_flag("--emit-plot-data", plot, "Also write plot_data.csv and prediction trajectories");

    auto* pre = app.add_subcommand("preset", "Run one of the built-in case studies");
    pre->add_option("name", preset_name, "case-i, case-ii or case-iii")
        ->required()
        ->check(CLI::IsMember(ufls::preset_names()));
    pre->add_option("--out", out, "Output root (default $UFLS_OUT or ./runs)");
    pre->add_flag("--emit-plot-data", plot, "Also write plot_data.csv and prediction trajectories");

    auto* sum = app.add_subcommand("summarize", "Print the report for a finished run directory");
    sum->add_option("run-dir", run_dir, "Run directory")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) {
            ufls::ScenarioConfig cfg = ufls::load_config(config_file);
            if (seed_noise) cfg.noise.seed = *seed_noise;
            if (seed_filter) cfg.filter.seed = *seed_filter;
            return execute(cfg, out, plot);
        }
        if (*pre) return execute(ufls::preset(preset_name), out, plot);
        if (*sum) {
            if (!fs::is_directory(run_dir)) {
                std::cerr << "ufls: not a directory: " << run_dir << "\n";
                return kExitConfig;
            }
            const std::string report = ufls::summarize_run_dir(run_dir);
            std::cout << report;
            return report.find("ERROR:") == std::string::npos ? 0 : kExitFault;
        }
    } catch (const ufls::ConfigError& e) {
        std::cerr << "ufls: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::invalid_argument& e) {
        std::cerr << "ufls: " << e.what() << "\n";
        return kExitConfig;
    } catch (const std::exception& e) {
        std::cerr << "ufls: " << e.what() << "\n";
        return kExitFault;
    }
    return 0;
}
