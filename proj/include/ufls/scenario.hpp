#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "ufls/controller.hpp"
#include "ufls/grid.hpp"
#include "ufls/measurement.hpp"
#include "ufls/particle_filter.hpp"
#include "ufls/predictor.hpp"

namespace ufls {

enum class Mode { ShedSingle, ShedMulti, Der, OpenLoop };

Mode mode_from_string(const std::string& s);
const char* to_string(Mode m);

struct ScenarioConfig {
    std::string name = "scenario";
    Mode mode = Mode::ShedSingle;
    double t_end = 15.0;  // s
    double dt = 1e-3;     // s

    GridParams grid;
    double initial_load = 1.0;  // pu, generation starts balanced against it

    NoiseModel noise;
    double sample_rate = 30.0;  // Hz

    FilterConfig filter;
    double filter_init_spread = 0.05;  // Hz

    PredictorConfig predictor;
    Thresholds thresholds;
    ShedPolicy policy;
    DerConfig der;

    std::vector<GridEvent> events;

    void validate() const;
};

class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

ScenarioConfig config_from_json_text(const std::string& text);
ScenarioConfig load_config(const std::filesystem::path& path);
std::string config_to_json_text(const ScenarioConfig& cfg);

ScenarioConfig preset(const std::string& name);
std::vector<std::string> preset_names();

struct PredictionRecord {
    Prediction prediction;
    std::optional<double> f_true_at_horizon;
    std::optional<double> error() const {
        if (!f_true_at_horizon) return std::nullopt;
        return prediction.f_p - *f_true_at_horizon;
    }
};

struct TriggerRecord {
    TriggerDecision decision;
};

struct RunSummary {
    double f_min = 0.0;
    double f_final = 0.0;
    std::optional<double> t_recovery;
    double total_shed = 0.0;
    int shed_count = 0;
    int der_command_count = 0;
    std::vector<std::optional<double>> prediction_errors;
    std::optional<double> der_engaged_at;
    int dropped_after_end = 0;
    std::string error;  // non-empty when the run was interrupted
};

struct RunResult {
    ScenarioConfig config;
    std::vector<GridState> trajectory;  // one state per grid step, t = 0 ... t_end
    std::vector<FrequencySample> samples;
    std::vector<EstimatePoint> estimates;
    std::vector<PredictionRecord> predictions;
    std::vector<TriggerRecord> triggers;
    std::vector<Actuation> actions;
    std::vector<double> action_L;  // load-excess factor behind each action
    RunSummary summary;
};

// Closed loop in lockstep. A simulation fault ends the run early; the
// partial result is returned with summary.error set.
RunResult run_scenario(const ScenarioConfig& cfg);

// First time f is back in [lo, hi] and stays there for hold seconds.
// Zero when it never left; nothing when it never settles.
std::optional<double> recovery_time(const std::vector<GridState>& traj, double lo = 59.9,
                                    double hi = 60.1, double hold = 2.0);

// Writes CSVs, the resolved config and summary.json into dir. Each file is
// written under a temporary name and renamed into place.
void write_artifacts(const RunResult& r, const std::filesystem::path& dir, bool plot_data);

std::string summary_to_json_text(const RunSummary& s);
std::string summarize_run_dir(const std::filesystem::path& dir);

std::string format_double(double v);

}  // namespace ufls
