// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <random>
#include <sstream>

#include "checks.hpp"
#include "ufls/controller.hpp"
#include "ufls/grid.hpp"
#include "ufls/particle_filter.hpp"
#include "ufls/predictor.hpp"
#include "ufls/scenario.hpp"

using namespace ufls;
using checks::num;
using checks::Outcome;

namespace {

std::string sci(double v) {
    std::ostringstream os;
    os.precision(2);
    os << std::scientific << v;
    return os.str();
}

Outcome filter_correctness() {
    Outcome o;
    FilterConfig cfg;  // defaults
    const double period = 1.0 / 30.0;
    ParticleFilter pf(cfg, 60.0, 0.05, 0.0, -period);
    NoiseModel noise{0.025, 11};
    Pmu pmu(noise, 30.0);
    double sse = 0, worst = 0;
    const int n = 300;  // 10 s
    for (int i = 0; i < n; ++i) {
        const FrequencySample z = pmu.measure(60.0);
        pf.propagate(z.t - pf.time());
        pf.update_weights(z.f_meas);
        worst = std::max(worst, std::abs(pf.weight_sum() - 1.0));
        pf.resample();
        worst = std::max(worst, std::abs(pf.weight_sum() - 1.0));
        const double e = pf.estimate().f - 60.0;
        sse += e * e;
    }
    const double rmse = std::sqrt(sse / n);
    o.note("rmse " + num(rmse) + " Hz, max |sum w - 1| " + sci(worst));
    o.require(rmse < 0.158, "rmse below raw noise sigma");
    o.require(worst <= 1e-12, "weights normalized after every cycle");
    return o;
}

Outcome grid_oracle() {
    Outcome o;
    GridParams p;
    p.H = 3.0;
    p.D = 0.0;
    p.governor_enabled = false;
    GridState s = equilibrium_state(p, 1.0);
    EventQueue q({{0.0, EventKind::GenerationLoss, 0.1}});
    const auto traj = run_until(s, p, q, 2.0, 1e-3);
    const auto at = [&](double t) { return traj[static_cast<std::size_t>(std::llround(t / 1e-3)) - 1].f; };
    const double rocof_meas = (at(2.0) - at(1.0)) / 1.0;
    const double expected = -0.1 * 60.0 / (2 * 3.0);
    const double rel = std::abs(rocof_meas - expected) / std::abs(expected);
    o.note("ROCOF " + num(rocof_meas, 6) + " Hz/s, relative error " + sci(rel));
    o.require(rel <= 1e-3, "within 0.1% of -1.000 Hz/s");
    return o;
}

// Straight from the printed formula, in extended precision.
long double brute_force_excess(long double Rp, long double H, long double p, long double f1,
                               long double fp) {
    const long double ratio = (fp * fp) / (f1 * f1);
    return Rp * H * (1.0L - ratio) / (p * (fp - f1));
}

Outcome excess_oracle() {
    Outcome o;
    std::mt19937_64 rng(20240611);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    double worst = 0;
    int sign_fail = 0;
    for (int i = 0; i < 10000; ++i) {
        const double H = 0.5 + 9.5 * u(rng);
        const double p = 0.1 + 0.9 * u(rng);
        const double f1 = 45.0 + 20.0 * u(rng);
        const double mag = std::pow(10.0, -5.0 + 5.7 * u(rng));  // 1e-5 .. 5 Hz
        const bool decline = u(rng) < 0.5;
        const double fp = decline ? f1 - mag : f1 + mag;
        const double tp = 0.1 + 4.9 * u(rng);
        const double Rp = (fp - f1) / tp;
        const double L = load_excess(Rp, H, p, f1, fp);
        const long double ref = brute_force_excess(Rp, H, p, f1, fp);
        worst = std::max(worst, static_cast<double>(std::abs((L - ref) / ref)));
        if (decline && !(L > 0)) ++sign_fail;
    }
    o.note("max relative error " + sci(worst) + ", sign failures " +
           std::to_string(sign_fail));
    o.require(worst <= 1e-12, "matches the brute-force evaluator to 1e-12");
    o.require(sign_fail == 0, "decline implies L > 0");
    return o;
}

Outcome adp_exactness() {
    Outcome o;
    const double rate = 30.0, period = 1.0 / rate;
    o.require(num_adps(3.0, rate) == 90, "90 ADPs for a 3 s horizon at 30 Hz");
    FilterConfig cfg;
    cfg.q_f = 0;
    cfg.q_fdot = 0;
    double worst = 0;
    for (double slope : {-0.5, -1.3, 0.2}) {
        for (auto src : {DerivativeSource::Estimates, DerivativeSource::FilterRate}) {
            auto line = [&](double t) { return 60.0 + slope * t; };
            ParticleFilter pf(cfg, line(-period), 0.0, slope, -period);
            DerivativeWindow w;
            w.t_s = period;
            for (int k = 0; k < 30; ++k) {
                FrequencySample z{k, k * period, line(k * period)};
                const Estimate e = pf.assimilate(z);
                w.samples.push_back({z.t, e.f, e.fdot});
            }
            const Prediction pr = predict_horizon(pf, w, 3.0, rate, src);
            const double err = std::abs(pr.f_p - line(pr.t_made + 3.0));
            worst = std::max(worst, err);
            o.require(pr.trajectory.size() == 90, "trajectory holds 90 points");
        }
    }
    o.note("max horizon error " + sci(worst) + " Hz");
    o.require(worst <= 1e-9, "horizon error <= 1e-9 Hz");
    return o;
}

Outcome determinism() {
    Outcome o;
    namespace fs = std::filesystem;
    const fs::path root = fs::temp_directory_path() / "ufls_acceptance_determinism";
    fs::remove_all(root);
    for (const auto& name : preset_names()) {
        for (int rep = 0; rep < 2; ++rep) {
            const RunResult r = run_scenario(preset(name));
            write_artifacts(r, root / std::to_string(rep) / name, true);
        }
        for (const auto& entry : fs::directory_iterator(root / "0" / name)) {
            auto read = [](const fs::path& p) {
                std::ifstream in(p, std::ios::binary);
                std::stringstream ss;
                ss << in.rdbuf();
                return ss.str();
            };
            const auto other = root / "1" / name / entry.path().filename();
            o.require(fs::exists(other) && read(entry.path()) == read(other),
                      name + "/" + entry.path().filename().string() + " identical");
        }
    }
    fs::remove_all(root);
    if (o.pass) o.note("all artifacts byte-identical across repeated runs of every preset");
    return o;
}

Outcome trigger_table() {
    Outcome o;
    Thresholds th;
    th.f_hard = 1.0;  // keep the level element out of the way
    const double rate = 30.0, period = 1.0 / rate;
    for (auto [R, expected] : {std::pair{-3.0, 0.05}, std::pair{-0.35, 0.35}}) {
        // 0.5 s flat, then a sustained ramp starting at the ramp_start sample
        std::vector<FrequencySample> s;
        const int ramp_start = 15;
        for (int k = 0; k < 120; ++k) {
            const double t = k * period;
            const double f = k <= ramp_start ? 60.0 : 60.0 + R * (t - ramp_start * period);
            s.push_back({k, t, f});
        }
        const auto d = check_trigger(s, th);
        if (!d) {
            o.require(false, "R = " + num(R, 2) + " trips");
            continue;
        }
        const double elapsed = d->t - ramp_start * period;
        o.note("R " + num(R, 2) + " Hz/s trips after " + num(elapsed, 4) + " s");
        o.require(checks::near(elapsed, expected, period),
                  "R = " + num(R, 2) + " trips in " + num(expected, 3) + " s +/- one sample");
    }
    return o;
}

}  // namespace

int main() {
    int failures = 0;
    auto report = [&](int id, const std::string& title, const Outcome& o) {
        std::cout << (o.pass ? "PASS" : "FAIL") << " criterion " << id << " (" << title
                  << "): " << o.detail << std::endl;
        if (!o.pass) ++failures;
    };

    report(1, "filter correctness", filter_correctness());
    report(2, "analytic grid oracle", grid_oracle());
    report(3, "load-excess oracle equivalence", excess_oracle());
    report(4, "ADP exactness", adp_exactness());

    const ScenarioConfig c1 = preset("case-i");
    report(5, "case I replication", checks::case_i(run_scenario(c1)));
    const ScenarioConfig c2 = preset("case-ii");
    report(6, "case II replication", checks::case_ii(run_scenario(c2)));
    const ScenarioConfig c3 = preset("case-iii");
    report(7, "case III replication",
           checks::case_iii(run_scenario(c3), run_scenario(checks::open_loop(c3))));

    report(8, "determinism", determinism());
    report(9, "trigger-table timing", trigger_table());

    std::cout << (failures == 0 ? "ALL CRITERIA PASSED" : std::to_string(failures) + " CRITERIA FAILED")
              << std::endl;
    return failures == 0 ? 0 : 1;
}
