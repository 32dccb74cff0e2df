#include "ufls/particle_filter.hpp"

#include <cmath>
#include <stdexcept>

namespace ufls {

void FilterConfig::validate() const {
    if (n_particles < 2) throw std::invalid_argument("filter: particle count must be >= 2");
    if (!(q_f >= 0) || !(q_fdot >= 0))
        throw std::invalid_argument("filter: process noise must be positive semidefinite");
    if (!(rm > 0)) throw std::invalid_argument("filter: measurement variance must be > 0");
}

std::vector<std::size_t> systematic_indices(const std::vector<double>& weights, std::size_t n,
                                            double u) {
    std::vector<std::size_t> idx;
    idx.reserve(n);
    if (weights.empty() || n == 0) return idx;
    const double step = 1.0 / static_cast<double>(n);
    double cum = weights[0];
    std::size_t j = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const double pos = u + static_cast<double>(i) * step;
        while (pos >= cum && j + 1 < weights.size()) cum += weights[++j];
        idx.push_back(j);
    }
    return idx;
}

ParticleFilter::ParticleFilter(const FilterConfig& cfg, double f_prior, double spread,
                               double fdot_prior, double t0)
    : cfg_(cfg), t_(t0), rng_(cfg.seed) {
    cfg_.validate();
    if (!(spread >= 0)) throw std::invalid_argument("filter: spread must be >= 0");
    const auto n = static_cast<std::size_t>(cfg_.n_particles);
    const double w = 1.0 / static_cast<double>(n);
    particles_.resize(n);
    for (auto& p : particles_) {
        p.f = f_prior + spread * normal_(rng_);
        p.fdot = fdot_prior;
        p.w = w;
    }
}

ParticleFilter::ParticleFilter(const FilterConfig& cfg, std::vector<Particle> particles,
                               double t0)
    : cfg_(cfg), particles_(std::move(particles)), t_(t0), rng_(cfg.seed) {
    cfg_.n_particles = static_cast<int>(particles_.size());
    cfg_.validate();
    double sum = 0;
    for (const auto& p : particles_) {
        if (!(p.w >= 0) || !std::isfinite(p.f) || !std::isfinite(p.fdot))
            throw std::invalid_argument("filter: particles need finite state and w >= 0");
        sum += p.w;
    }
    if (!(sum > 0)) throw std::invalid_argument("filter: weights must not all be zero");
    for (auto& p : particles_) p.w /= sum;
}

void ParticleFilter::propagate(double dt) {
    if (!(dt > 0)) throw std::invalid_argument("filter: propagate dt must be > 0");
    const double sf = std::sqrt(cfg_.q_f), sv = std::sqrt(cfg_.q_fdot);
    for (auto& p : particles_) {
        const double nf = normal_(rng_);
        const double nv = normal_(rng_);
        p.f = p.f + p.fdot * dt + sf * nf;
        p.fdot = p.fdot + sv * nv;
    }
    t_ += dt;
}

bool ParticleFilter::update_weights(double z) {
    double sum = 0;
    const double inv = 1.0 / (2.0 * cfg_.rm);
    for (auto& p : particles_) {
        const double r = z - p.f;
        p.w *= std::exp(-r * r * inv);
        sum += p.w;
    }
    if (!(sum > 0) || !std::isfinite(sum)) {
        const double w = 1.0 / static_cast<double>(particles_.size());
        for (auto& p : particles_) p.w = w;
        ++degenerate_resets_;
        return false;
    }
    for (auto& p : particles_) p.w /= sum;
    return true;
}

Estimate ParticleFilter::estimate() const {
    Estimate e;
    for (const auto& p : particles_) {
        e.f += p.w * p.f;
        e.fdot += p.w * p.fdot;
    }
    return e;
}

void ParticleFilter::resample() {
    const std::size_t n = particles_.size();
    std::vector<double> w(n);
    for (std::size_t i = 0; i < n; ++i) w[i] = particles_[i].w;
    const double u = uniform_(rng_) / static_cast<double>(n);
    const auto idx = systematic_indices(w, n, u);
    scratch_.resize(n);
    const double wn = 1.0 / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        scratch_[i] = particles_[idx[i]];
        scratch_[i].w = wn;
    }
    particles_.swap(scratch_);
}

Estimate ParticleFilter::assimilate(const FrequencySample& z) {
    propagate(z.t - t_);
    update_weights(z.f_meas);
    resample();
    t_ = z.t;
    return estimate();
}

double ParticleFilter::weight_sum() const {
    double s = 0;
    for (const auto& p : particles_) s += p.w;
    return s;
}

}  // namespace ufls
