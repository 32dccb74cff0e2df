#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ufls/grid.hpp"

namespace ufls {

struct FrequencySample {
    std::int64_t seq = 0;
    double t = 0.0;
    double f_meas = 0.0;
};

struct NoiseModel {
    double variance = 0.025;  // Hz^2
    std::uint64_t seed = 1;
};

// Sequential PMU emulator. Sample n is due at t0 + n / rate.
class Pmu {
public:
    Pmu(const NoiseModel& noise, double rate_hz, double t0 = 0.0);

    double next_time() const { return t0_ + static_cast<double>(seq_) / rate_; }
    std::int64_t next_seq() const { return seq_; }
    double rate() const { return rate_; }
    FrequencySample measure(double f_true);

private:
    double t0_;
    double rate_;
    double sigma_;
    std::int64_t seq_ = 0;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
};

// One sample per full reporting period covered by the trajectory; the true
// value comes from the nearest trajectory step. Each state stands for the
// interval [t, t + dt) so 3 s of 1 ms states gives 90 samples at 30 Hz.
std::vector<FrequencySample> sample_stream(const std::vector<GridState>& trajectory,
                                           const NoiseModel& noise, double rate_hz);

}  // namespace ufls
