#pragma once

#include <string>
#include <vector>

#include "ufls/particle_filter.hpp"

namespace ufls {

struct EstimatePoint {
    double t = 0.0;
    double f = 0.0;     // Hz
    double fdot = 0.0;  // Hz/s, filter velocity estimate
};

// Last estimates before a prediction, uniformly spaced by t_s.
struct DerivativeWindow {
    std::vector<EstimatePoint> samples;
    double t_s = 1.0 / 30.0;

    static constexpr std::size_t kLength = 10;
    bool full() const { return samples.size() >= kLength; }
};

struct Derivatives {
    double fprime = 0.0;   // Hz/s
    double fsecond = 0.0;  // Hz/s^2
};

enum class DerivativeSource {
    Estimates,   // finite differences of the frequency estimates
    FilterRate,  // mean of the filter's velocity estimates and their differences
};

DerivativeSource derivative_source_from_string(const std::string& s);
const char* to_string(DerivativeSource s);

int num_adps(double t_p, double f_s);

// Mean of the 9 first differences / t_s and of the 8 second differences / t_s^2.
Derivatives estimate_derivatives(const DerivativeWindow& window);
// Mean velocity estimate and mean of its 9 first differences / t_s.
Derivatives rate_derivatives(const DerivativeWindow& window);
Derivatives window_derivatives(const DerivativeWindow& window, DerivativeSource src);

// ADP_i = ADP_{i-1} + t_s f', then f' += t_s f''. ADP_0 = last.
std::vector<double> generate_adps(double last, double fprime, double fsecond, int n, double t_s);

struct Prediction {
    double t_made = 0.0;
    double t_p = 3.0;
    double f1 = 0.0;
    Derivatives derivs;
    std::vector<double> adps;
    std::vector<EstimatePoint> trajectory;  // filtered ADPs, times in (t_made, t_made + t_p]
    double f_p = 0.0;
};

// Runs the ADPs through a clone of the filter; the live filter is untouched.
Prediction predict_horizon(const ParticleFilter& filter, const DerivativeWindow& window,
                           double t_p, double f_s,
                           DerivativeSource src = DerivativeSource::Estimates);

}  // namespace ufls
