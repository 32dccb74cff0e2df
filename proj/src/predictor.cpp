#include "ufls/predictor.hpp"

#include <cmath>
#include <stdexcept>

namespace ufls {

DerivativeSource derivative_source_from_string(const std::string& s) {
    if (s == "estimates") return DerivativeSource::Estimates;
    if (s == "filter_rate") return DerivativeSource::FilterRate;
    throw std::invalid_argument("unknown derivative source '" + s + "'");
}

const char* to_string(DerivativeSource s) {
    return s == DerivativeSource::Estimates ? "estimates" : "filter_rate";
}

int num_adps(double t_p, double f_s) {
    if (!(t_p > 0) || !(f_s > 0)) throw std::invalid_argument("num_adps: t_p and f_s must be > 0");
    const auto n = std::llround(t_p * f_s);
    return static_cast<int>(n < 1 ? 1 : n);
}

namespace {

std::vector<EstimatePoint> last_ten(const DerivativeWindow& w) {
    if (!w.full()) throw std::invalid_argument("derivative window needs 10 estimates");
    if (!(w.t_s > 0)) throw std::invalid_argument("derivative window t_s must be > 0");
    return {w.samples.end() - DerivativeWindow::kLength, w.samples.end()};
}

}  // namespace

Derivatives estimate_derivatives(const DerivativeWindow& window) {
    const auto s = last_ten(window);
    const std::size_t n = s.size();
    double d1 = 0, d2 = 0;
    for (std::size_t i = 1; i < n; ++i) d1 += s[i].f - s[i - 1].f;
    for (std::size_t i = 2; i < n; ++i) d2 += s[i].f - 2 * s[i - 1].f + s[i - 2].f;
    Derivatives d;
    d.fprime = d1 / static_cast<double>(n - 1) / window.t_s;
    d.fsecond = d2 / static_cast<double>(n - 2) / (window.t_s * window.t_s);
    return d;
}

Derivatives rate_derivatives(const DerivativeWindow& window) {
    const auto s = last_ten(window);
    const std::size_t n = s.size();
    double m = 0, d1 = 0;
    for (std::size_t i = 0; i < n; ++i) m += s[i].fdot;
    for (std::size_t i = 1; i < n; ++i) d1 += s[i].fdot - s[i - 1].fdot;
    Derivatives d;
    d.fprime = m / static_cast<double>(n);
    d.fsecond = d1 / static_cast<double>(n - 1) / window.t_s;
    return d;
}

Derivatives window_derivatives(const DerivativeWindow& window, DerivativeSource src) {
    return src == DerivativeSource::Estimates ? estimate_derivatives(window)
                                              : rate_derivatives(window);
}

std::vector<double> generate_adps(double last, double fprime, double fsecond, int n, double t_s) {
    if (n < 1) throw std::invalid_argument("generate_adps: n must be >= 1");
    std::vector<double> out;
    out.reserve(static_cast<std::size_t>(n));
    double prev = last;
    for (int i = 0; i < n; ++i) {
        prev = prev + t_s * fprime;
        fprime = fprime + t_s * fsecond;
        out.push_back(prev);
    }
    return out;
}

Prediction predict_horizon(const ParticleFilter& filter, const DerivativeWindow& window,
                           double t_p, double f_s, DerivativeSource src) {
    const int n = num_adps(t_p, f_s);
    const double t_s = 1.0 / f_s;
    Prediction pr;
    pr.t_made = window.samples.back().t;
    pr.t_p = t_p;
    pr.f1 = window.samples.back().f;
    pr.derivs = window_derivatives(window, src);
    pr.adps = generate_adps(pr.f1, pr.derivs.fprime, pr.derivs.fsecond, n, t_s);

    ParticleFilter clone = filter;
    pr.trajectory.reserve(pr.adps.size());
    for (int i = 0; i < n; ++i) {
        FrequencySample z;
        z.seq = i;
        z.t = pr.t_made + static_cast<double>(i + 1) * t_s;
        z.f_meas = pr.adps[static_cast<std::size_t>(i)];
        const Estimate e = clone.assimilate(z);
        pr.trajectory.push_back({z.t, e.f, e.fdot});
    }
    pr.f_p = pr.trajectory.back().f;
    return pr;
}

}  // namespace ufls
