#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "ufls/measurement.hpp"

namespace ufls {

struct Particle {
    double f = 0.0;     // Hz
    double fdot = 0.0;  // Hz/s
    double w = 0.0;
};

struct FilterConfig {
    int n_particles = 1000;
    double q_f = 1e-6;     // Hz^2, process noise on f per step
    double q_fdot = 1e-3;  // (Hz/s)^2, process noise on fdot per step
    double rm = 0.025;     // Hz^2, measurement noise variance
    std::uint64_t seed = 2;

    void validate() const;
};

struct Estimate {
    double f = 0.0;
    double fdot = 0.0;
};

// Systematic resampling: n indices drawn from cumulative weights using the
// comb u, u + 1/n, ... with u in [0, 1/n).
std::vector<std::size_t> systematic_indices(const std::vector<double>& weights, std::size_t n,
                                            double u);

// Bootstrap particle filter over [f, fdot] with constant-velocity propagation.
// Copying a filter yields an independent clone, RNG state included.
class ParticleFilter {
public:
    ParticleFilter(const FilterConfig& cfg, double f_prior, double spread, double fdot_prior = 0.0,
                   double t0 = 0.0);
    ParticleFilter(const FilterConfig& cfg, std::vector<Particle> particles, double t0 = 0.0);

    void propagate(double dt);
    // Returns false when every likelihood underflowed and weights were reset to uniform.
    bool update_weights(double z);
    Estimate estimate() const;
    void resample();
    // propagate -> update_weights -> resample
    Estimate assimilate(const FrequencySample& z);

    double time() const { return t_; }
    std::size_t size() const { return particles_.size(); }
    const std::vector<Particle>& particles() const { return particles_; }
    const FilterConfig& config() const { return cfg_; }
    double weight_sum() const;
    std::int64_t degenerate_resets() const { return degenerate_resets_; }

private:
    FilterConfig cfg_;
    std::vector<Particle> particles_;
    double t_ = 0.0;
    std::int64_t degenerate_resets_ = 0;
    std::mt19937_64 rng_;
    std::normal_distribution<double> normal_{0.0, 1.0};
    std::uniform_real_distribution<double> uniform_{0.0, 1.0};
    std::vector<Particle> scratch_;
};

}  // namespace ufls
