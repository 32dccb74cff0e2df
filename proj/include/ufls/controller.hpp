#pragma once

#include <deque>
#include <optional>
#include <string>
#include <vector>

#include "ufls/grid.hpp"
#include "ufls/measurement.hpp"
#include "ufls/predictor.hpp"

namespace ufls {

double rocof(double f1, double f2, double dt);

struct RocofBand {
    double r_low = 0.0;   // Hz/s, magnitude
    double r_high = 0.0;  // Hz/s, magnitude
    int delay_cycles = 0; // cycles at 60 Hz
};

struct Thresholds {
    double f_hard = 59.3;  // Hz
    std::vector<RocofBand> rocof_table = default_rocof_table();
    double recovery_band = 59.9;  // Hz, predictions at or above this count as recovering
    double f_nominal = 60.0;      // Hz, the ROCOF element is blocked at or above this
    double cycle_seconds = 1.0 / 60.0;

    static std::vector<RocofBand> default_rocof_table();
    void validate() const;
    // Delay in seconds for a declining rate R, or nothing when no row matches.
    std::optional<double> soft_delay(double R) const;
};

enum class TriggerKind { Hard, Soft };

struct TriggerDecision {
    double t = 0.0;
    TriggerKind kind = TriggerKind::Hard;
    double R = 0.0;
};

// Streaming trigger. Each qualifying sample contributes one sample period of
// persistence; a soft trip happens once the accumulated persistence reaches
// the current row's delay. A non-qualifying sample resets the count.
class TriggerDetector {
public:
    TriggerDetector(Thresholds th, double sample_period);
    std::optional<TriggerDecision> feed(double t, double f_est, double R);
    void reset() { count_ = 0; }

private:
    Thresholds th_;
    double period_;
    long count_ = 0;
};

// Hard trigger on the level, soft trigger on R between consecutive samples.
std::optional<TriggerDecision> check_trigger(const std::vector<FrequencySample>& samples,
                                             const Thresholds& th);

double load_excess(double R_p, double H, double p, double f1, double f_p);

struct ShedPolicy {
    int stages = 1;
    double stage_fraction = 1.0;
    double repredict_interval = 1.0;  // s
    double processing_delay = 1.0;    // s

    void validate() const;
};

struct ShedAction {
    double t_issue = 0.0;
    double t_effect = 0.0;
    double amount = 0.0;  // pu
    double L = 0.0;
};

std::optional<ShedAction> plan_shed(const Prediction& pred, const GridParams& grid,
                                    const ShedPolicy& policy, const Thresholds& th, double t_now,
                                    double connected_load = 1.0);

struct DerCommand {
    double t_issue = 0.0;
    double t_effect = 0.0;
    double setpoint = 0.0;  // pu
    double L = 0.0;
};

enum class DerReference {
    Nominal,  // rate from the nominal frequency to the estimate over window_seconds
    Window,   // rate across the last estimates spanning window_seconds
};

DerReference der_reference_from_string(const std::string& s);
const char* to_string(DerReference r);

struct DerConfig {
    DerReference reference = DerReference::Nominal;
    double window_seconds = 1.0;
    double deadband = 0.1;   // Hz below nominal that engages the controller
    double load_base = 1.0;  // pu
    double delay = 0.5;      // s

    void validate() const;
};

// Mismatch setpoint from the rate between f_ref and f_now over window seconds.
DerCommand der_setpoint(double f_now, double f_ref, double window, const GridParams& grid,
                        const DerConfig& cfg, double t_now);

// Continuous DER controller. Engages once the estimate falls below the deadband
// and then commands a setpoint every measurement.
class DerController {
public:
    DerController(DerConfig cfg, GridParams grid, double sample_period);
    std::optional<DerCommand> on_estimate(const EstimatePoint& e);
    bool active() const { return active_; }
    std::optional<double> engaged_at() const { return engaged_at_; }

private:
    DerConfig cfg_;
    GridParams grid_;
    double period_;
    bool active_ = false;
    std::optional<double> engaged_at_;
    std::deque<EstimatePoint> history_;
    long seen_ = 0;
};

struct PredictorConfig {
    double horizon = 3.0;  // s
    DerivativeSource source = DerivativeSource::Estimates;
};

struct ShedStepOutcome {
    std::optional<TriggerDecision> trigger;
    std::optional<Prediction> prediction;
    std::optional<ShedAction> action;
};

// Staged shedding state machine. A trigger opens an episode with an immediate
// prediction; while stages remain, re-predicts every repredict_interval. The
// episode ends when a prediction shows recovery or the stages run out. The
// trigger re-arms once the estimate is back at the recovery band.
class ShedController {
public:
    ShedController(Thresholds th, ShedPolicy policy, PredictorConfig pred, GridParams grid,
                   double sample_rate);
    ShedStepOutcome on_estimate(const EstimatePoint& e, const ParticleFilter& filter,
                                double connected_load);
    bool in_episode() const { return in_episode_; }

private:
    Thresholds th_;
    ShedPolicy policy_;
    PredictorConfig pred_;
    GridParams grid_;
    double rate_;
    TriggerDetector detector_;
    DerivativeWindow window_;
    bool armed_ = true;
    bool in_episode_ = false;
    int stage_ = 0;
    double next_prediction_ = 0.0;
};

}  // namespace ufls
