#include "ufls/measurement.hpp"

#include <cmath>
#include <stdexcept>

namespace ufls {

Pmu::Pmu(const NoiseModel& noise, double rate_hz, double t0)
    : t0_(t0), rate_(rate_hz), sigma_(std::sqrt(noise.variance)), rng_(noise.seed) {
    if (!(rate_hz > 0)) throw std::invalid_argument("measurement rate must be > 0");
    if (!(noise.variance >= 0)) throw std::invalid_argument("noise variance must be >= 0");
}

FrequencySample Pmu::measure(double f_true) {
    FrequencySample s;
    s.seq = seq_;
    s.t = next_time();
    // always draw, so the stream with variance 0 stays aligned with the noisy one
    const double n = normal_(rng_);
    s.f_meas = f_true + sigma_ * n;
    ++seq_;
    return s;
}

std::vector<FrequencySample> sample_stream(const std::vector<GridState>& trajectory,
                                           const NoiseModel& noise, double rate_hz) {
    std::vector<FrequencySample> out;
    if (!(rate_hz > 0)) throw std::invalid_argument("measurement rate must be > 0");
    if (trajectory.size() < 2) return out;
    const double t0 = trajectory.front().t;
    const double dt = trajectory[1].t - trajectory[0].t;
    if (!(dt > 0)) throw std::invalid_argument("trajectory must be strictly increasing in time");
    const double span = static_cast<double>(trajectory.size()) * dt;
    const double period = 1.0 / rate_hz;
    if (dt > period * (1 + 1e-9))
        throw std::invalid_argument("trajectory coarser than the reporting period");

    Pmu pmu(noise, rate_hz, t0);
    const auto count = static_cast<long>(std::floor(span * rate_hz + 1e-9));
    out.reserve(static_cast<std::size_t>(count));
    for (long n = 0; n < count; ++n) {
        const double t = pmu.next_time();
        auto idx = static_cast<std::size_t>(std::llround((t - t0) / dt));
        if (idx >= trajectory.size()) idx = trajectory.size() - 1;
        out.push_back(pmu.measure(trajectory[idx].f));
    }
    return out;
}

}  // namespace ufls
