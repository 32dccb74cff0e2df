#include "ufls/controller.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ufls {

double rocof(double f1, double f2, double dt) {
    if (!(dt > 0)) throw std::invalid_argument("rocof: dt must be > 0");
    return (f2 - f1) / dt;
}

std::vector<RocofBand> Thresholds::default_rocof_table() {
    return {{0.33, 0.37, 21}, {0.38, 0.99, 15}, {1.0, 2.32, 8}, {2.33, 15.0, 3}};
}

void Thresholds::validate() const {
    if (!(f_hard > 0)) throw std::invalid_argument("thresholds: f_hard must be > 0");
    if (!(cycle_seconds > 0)) throw std::invalid_argument("thresholds: cycle length must be > 0");
    for (std::size_t i = 0; i < rocof_table.size(); ++i) {
        const auto& r = rocof_table[i];
        if (!(r.r_low >= 0 && r.r_high >= r.r_low) || r.delay_cycles < 0)
            throw std::invalid_argument("thresholds: malformed ROCOF row");
        if (i > 0) {
            const auto& prev = rocof_table[i - 1];
            if (!(r.r_low > prev.r_high))
                throw std::invalid_argument("thresholds: ROCOF rows must be ordered and disjoint");
            if (r.delay_cycles > prev.delay_cycles)
                throw std::invalid_argument("thresholds: delays must not grow with |R|");
        }
    }
}

std::optional<double> Thresholds::soft_delay(double R) const {
    if (!(R < 0)) return std::nullopt;  // underfrequency element: declines only
    const double a = -R;
    for (const auto& row : rocof_table)
        if (a >= row.r_low && a <= row.r_high) return row.delay_cycles * cycle_seconds;
    return std::nullopt;
}

TriggerDetector::TriggerDetector(Thresholds th, double sample_period)
    : th_(std::move(th)), period_(sample_period) {
    th_.validate();
    if (!(period_ > 0)) throw std::invalid_argument("trigger: sample period must be > 0");
}

std::optional<TriggerDecision> TriggerDetector::feed(double t, double f_est, double R) {
    if (f_est < th_.f_hard) {
        count_ = 0;
        return TriggerDecision{t, TriggerKind::Hard, R};
    }
    // the ROCOF element only acts below nominal frequency
    const auto delay = f_est < th_.f_nominal ? th_.soft_delay(R) : std::nullopt;
    if (!delay) {
        count_ = 0;
        return std::nullopt;
    }
    ++count_;
    if (static_cast<double>(count_) * period_ >= *delay - 1e-9) {
        count_ = 0;
        return TriggerDecision{t, TriggerKind::Soft, R};
    }
    return std::nullopt;
}

std::optional<TriggerDecision> check_trigger(const std::vector<FrequencySample>& samples,
                                             const Thresholds& th) {
    if (samples.size() < 2) return std::nullopt;
    const double period = samples[1].t - samples[0].t;
    TriggerDetector det(th, period);
    if (samples[0].f_meas < th.f_hard)
        return TriggerDecision{samples[0].t, TriggerKind::Hard, 0.0};
    for (std::size_t i = 1; i < samples.size(); ++i) {
        const double R = rocof(samples[i - 1].f_meas, samples[i].f_meas,
                               samples[i].t - samples[i - 1].t);
        if (auto d = det.feed(samples[i].t, samples[i].f_meas, R)) return d;
    }
    return std::nullopt;
}

double load_excess(double R_p, double H, double p, double f1, double f_p) {
    if (!(p > 0)) throw std::invalid_argument("load_excess: power factor must be > 0");
    if (!(f1 > 0)) throw std::invalid_argument("load_excess: f1 must be > 0");
    if (std::abs(f_p - f1) < 1e-6) return 0.0;
    // 1 - f_p^2/f1^2 written as a product to avoid cancellation when f_p ~ f1
    const double ratio_term = (f1 - f_p) * (f1 + f_p) / (f1 * f1);
    return R_p * H * ratio_term / (p * (f_p - f1));
}

void ShedPolicy::validate() const {
    if (stages < 1) throw std::invalid_argument("policy: stages must be >= 1");
    if (!(stage_fraction > 0 && stage_fraction <= 1))
        throw std::invalid_argument("policy: stage fraction must be in (0, 1]");
    if (!(repredict_interval >= 0) || !(processing_delay >= 0))
        throw std::invalid_argument("policy: delays must be >= 0");
}

std::optional<ShedAction> plan_shed(const Prediction& pred, const GridParams& grid,
                                    const ShedPolicy& policy, const Thresholds& th, double t_now,
                                    double connected_load) {
    if (pred.f_p >= th.recovery_band) return std::nullopt;
    const double R_p = rocof(pred.f1, pred.f_p, pred.t_p);
    const double L = load_excess(R_p, grid.H, grid.pf, pred.f1, pred.f_p);
    if (!(L > 0)) return std::nullopt;
    ShedAction a;
    a.t_issue = t_now;
    a.t_effect = t_now + policy.processing_delay;
    a.amount = policy.stage_fraction * L * connected_load;
    a.L = L;
    return a;
}

DerReference der_reference_from_string(const std::string& s) {
    if (s == "nominal") return DerReference::Nominal;
    if (s == "window") return DerReference::Window;
    throw std::invalid_argument("unknown DER reference '" + s + "'");
}

const char* to_string(DerReference r) { return r == DerReference::Nominal ? "nominal" : "window"; }

void DerConfig::validate() const {
    if (!(window_seconds > 0)) throw std::invalid_argument("der: window must be > 0");
    if (!(deadband >= 0)) throw std::invalid_argument("der: deadband must be >= 0");
    if (!(load_base > 0)) throw std::invalid_argument("der: load base must be > 0");
    if (!(delay >= 0)) throw std::invalid_argument("der: delay must be >= 0");
}

DerCommand der_setpoint(double f_now, double f_ref, double window, const GridParams& grid,
                        const DerConfig& cfg, double t_now) {
    const double R = rocof(f_ref, f_now, window);
    const double L = load_excess(R, grid.H, grid.pf, f_ref, f_now);
    DerCommand c;
    c.t_issue = t_now;
    c.t_effect = t_now + cfg.delay;
    c.L = L;
    c.setpoint = std::max(0.0, L * cfg.load_base);
    return c;
}

DerController::DerController(DerConfig cfg, GridParams grid, double sample_period)
    : cfg_(cfg), grid_(grid), period_(sample_period) {
    cfg_.validate();
    if (!(period_ > 0)) throw std::invalid_argument("der: sample period must be > 0");
}

std::optional<DerCommand> DerController::on_estimate(const EstimatePoint& e) {
    const auto lag = static_cast<std::size_t>(std::max<long long>(1, std::llround(cfg_.window_seconds / period_)));
    history_.push_back(e);
    while (history_.size() > lag + 1) history_.pop_front();
    // same warm-up as the shed path: no decisions before a full estimate window
    if (++seen_ < static_cast<long>(DerivativeWindow::kLength)) return std::nullopt;

    if (!active_ && grid_.f0 - e.f > cfg_.deadband) {
        active_ = true;
        engaged_at_ = e.t;
    }
    if (!active_) return std::nullopt;

    if (cfg_.reference == DerReference::Nominal)
        return der_setpoint(e.f, grid_.f0, cfg_.window_seconds, grid_, cfg_, e.t);
    const EstimatePoint& old = history_.front();
    if (!(e.t > old.t)) return DerCommand{e.t, e.t + cfg_.delay, 0.0, 0.0};
    return der_setpoint(e.f, old.f, e.t - old.t, grid_, cfg_, e.t);
}

ShedController::ShedController(Thresholds th, ShedPolicy policy, PredictorConfig pred,
                               GridParams grid, double sample_rate)
    : th_(th), policy_(policy), pred_(pred), grid_(grid), rate_(sample_rate),
      detector_([&] {
          th.f_nominal = grid.f0;
          return th;
      }(), 1.0 / sample_rate) {
    th_.f_nominal = grid.f0;
    policy_.validate();
    window_.t_s = 1.0 / sample_rate;
}

ShedStepOutcome ShedController::on_estimate(const EstimatePoint& e, const ParticleFilter& filter,
                                            double connected_load) {
    ShedStepOutcome out;
    window_.samples.push_back(e);
    if (window_.samples.size() > DerivativeWindow::kLength)
        window_.samples.erase(window_.samples.begin());
    if (!window_.full()) return out;

    if (!in_episode_) {
        if (!armed_) {
            if (e.f >= th_.recovery_band) {
                armed_ = true;
                detector_.reset();
            }
            return out;
        }
        out.trigger = detector_.feed(e.t, e.f, e.fdot);
        if (!out.trigger) return out;
        in_episode_ = true;
        armed_ = false;
        stage_ = 0;
        next_prediction_ = e.t;
    }

    if (e.t < next_prediction_ - 1e-9) return out;
    out.prediction = predict_horizon(filter, window_, pred_.horizon, rate_, pred_.source);
    out.action = plan_shed(*out.prediction, grid_, policy_, th_, e.t, connected_load);
    if (!out.action) {
        in_episode_ = false;
        return out;
    }
    ++stage_;
    if (stage_ < policy_.stages)
        next_prediction_ = e.t + policy_.repredict_interval;
    else
        in_episode_ = false;
    return out;
}

}  // namespace ufls
