#include "ufls/scenario.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace ufls {

using nlohmann::json;

std::string format_double(double v) {
    char buf[64];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

std::optional<double> recovery_time(const std::vector<GridState>& traj, double lo, double hi,
                                    double hold) {
    if (traj.empty()) return std::nullopt;
    auto in_band = [&](const GridState& s) { return s.f >= lo && s.f <= hi; };
    auto first_out = std::find_if_not(traj.begin(), traj.end(), in_band);
    if (first_out == traj.end()) return 0.0;

    // next_out[i]: index of the first out-of-band state at or after i
    const std::size_t n = traj.size();
    std::vector<std::size_t> next_out(n + 1, n);
    for (std::size_t i = n; i-- > 0;) next_out[i] = in_band(traj[i]) ? next_out[i + 1] : i;

    const double t_last = traj.back().t;
    for (auto i = static_cast<std::size_t>(first_out - traj.begin()); i < n; ++i) {
        if (!in_band(traj[i])) continue;
        const double until = traj[i].t + hold;
        if (until > t_last + 1e-9) break;
        if (next_out[i] == n || traj[next_out[i]].t > until + 1e-9) return traj[i].t;
        i = next_out[i];
    }
    return std::nullopt;
}

RunResult run_scenario(const ScenarioConfig& cfg) {
    cfg.validate();
    RunResult r;
    r.config = cfg;

    const double period = 1.0 / cfg.sample_rate;
    GridState s = equilibrium_state(cfg.grid, cfg.initial_load);
    EventQueue queue(cfg.events);
    Pmu pmu(cfg.noise, cfg.sample_rate, 0.0);
    ParticleFilter filter(cfg.filter, cfg.grid.f0, cfg.filter_init_spread, 0.0, -period);

    std::optional<ShedController> shed;
    std::optional<DerController> der;
    if (cfg.mode == Mode::ShedSingle || cfg.mode == Mode::ShedMulti)
        shed.emplace(cfg.thresholds, cfg.policy, cfg.predictor, cfg.grid, cfg.sample_rate);
    if (cfg.mode == Mode::Der) der.emplace(cfg.der, cfg.grid, period);

    const long n_steps = std::llround(cfg.t_end / cfg.dt);
    r.trajectory.reserve(static_cast<std::size_t>(n_steps + 1));

    auto issue = [&](double t_now, double t_effect, EventKind kind, double magnitude, double L) {
        if (t_effect > cfg.t_end + 1e-9) {
            ++r.summary.dropped_after_end;
            return;
        }
        Actuation a{t_now, t_effect, kind, magnitude};
        apply_actuation(queue, a, t_now);
        r.actions.push_back(a);
        r.action_L.push_back(L);
    };

    try {
        for (long k = 0; k <= n_steps; ++k) {
            s.t = static_cast<double>(k) * cfg.dt;
            apply_due_events(s, queue, cfg.dt);
            r.trajectory.push_back(s);

            // sampling is half-open like sample_stream: nothing is reported at t_end itself
            if (k < n_steps && std::llround(pmu.next_time() / cfg.dt) == k) {
                const FrequencySample z = pmu.measure(s.f);
                r.samples.push_back(z);
                const Estimate est = filter.assimilate(z);
                const EstimatePoint ep{z.t, est.f, est.fdot};
                r.estimates.push_back(ep);

                if (shed) {
                    ShedStepOutcome out = shed->on_estimate(ep, filter, s.Pe);
                    if (out.trigger) r.triggers.push_back({*out.trigger});
                    if (out.prediction) r.predictions.push_back({*out.prediction, std::nullopt});
                    if (out.action)
                        issue(z.t, out.action->t_effect, EventKind::Shed, out.action->amount,
                              out.action->L);
                }
                if (der) {
                    if (auto cmd = der->on_estimate(ep))
                        issue(z.t, cmd->t_effect, EventKind::DerSetpoint, cmd->setpoint, cmd->L);
                }
            }
            if (k < n_steps) s = integrate(s, cfg.grid, cfg.dt);
        }
    } catch (const SimulationFault& e) {
        r.summary.error = e.what();
    } catch (const LatencyViolation& e) {
        r.summary.error = e.what();
    }

    RunSummary& sm = r.summary;
    sm.f_min = cfg.grid.f0;
    for (const auto& st : r.trajectory) sm.f_min = std::min(sm.f_min, st.f);
    sm.f_final = r.trajectory.empty() ? cfg.grid.f0 : r.trajectory.back().f;
    sm.t_recovery = recovery_time(r.trajectory);
    for (std::size_t i = 0; i < r.actions.size(); ++i) {
        if (r.actions[i].kind == EventKind::Shed) {
            sm.total_shed += r.actions[i].magnitude;
            ++sm.shed_count;
        } else {
            ++sm.der_command_count;
        }
    }
    for (auto& p : r.predictions) {
        const double t_h = p.prediction.t_made + p.prediction.t_p;
        const auto idx = std::llround(t_h / cfg.dt);
        if (idx >= 0 && static_cast<std::size_t>(idx) < r.trajectory.size())
            p.f_true_at_horizon = r.trajectory[static_cast<std::size_t>(idx)].f;
        sm.prediction_errors.push_back(p.error());
    }
    if (der) sm.der_engaged_at = der->engaged_at();
    return r;
}

namespace {

void write_atomic(const std::filesystem::path& path, const std::string& content) {
    auto tmp = path;
    tmp += ".tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw std::runtime_error("cannot write " + tmp.string());
        out << content;
        if (!out) throw std::runtime_error("write failed for " + tmp.string());
    }
    std::filesystem::rename(tmp, path);
}

json opt(const std::optional<double>& v) { return v ? json(*v) : json(nullptr); }

}  // namespace

std::string summary_to_json_text(const RunSummary& s) {
    json errs = json::array();
    for (const auto& e : s.prediction_errors) errs.push_back(opt(e));
    json j = {{"f_min_hz", s.f_min},
              {"f_final_hz", s.f_final},
              {"t_recovery_seconds", opt(s.t_recovery)},
              {"total_shed_pu", s.total_shed},
              {"shed_count", s.shed_count},
              {"der_command_count", s.der_command_count},
              {"der_engaged_at_seconds", opt(s.der_engaged_at)},
              {"prediction_errors_hz", errs},
              {"dropped_after_end", s.dropped_after_end},
              {"error", s.error.empty() ? json(nullptr) : json(s.error)}};
    return j.dump(2) + "\n";
}

void write_artifacts(const RunResult& r, const std::filesystem::path& dir, bool plot_data) {
    std::filesystem::create_directories(dir);
    const auto d = format_double;

    {
        std::ostringstream os;
        os << "# seq: count, t: s, f_meas: Hz\nseq,t,f_meas\n";
        for (const auto& z : r.samples) os << z.seq << ',' << d(z.t) << ',' << d(z.f_meas) << '\n';
        write_atomic(dir / "samples.csv", os.str());
    }
    {
        std::ostringstream os;
        os << "# t: s, f_est: Hz, fdot_est: Hz/s\nt,f_est,fdot_est\n";
        for (const auto& e : r.estimates) os << d(e.t) << ',' << d(e.f) << ',' << d(e.fdot) << '\n';
        write_atomic(dir / "estimates.csv", os.str());
    }
    {
        std::ostringstream os;
        os << "# t_made: s, f1: Hz, f_p: Hz, t_p: s\nt_made,f1,f_p,t_p\n";
        for (const auto& p : r.predictions)
            os << d(p.prediction.t_made) << ',' << d(p.prediction.f1) << ',' << d(p.prediction.f_p)
               << ',' << d(p.prediction.t_p) << '\n';
        write_atomic(dir / "predictions.csv", os.str());
    }
    {
        std::ostringstream os;
        os << "# t_issue: s, t_effect: s, kind: label, magnitude: pu\n"
              "t_issue,t_effect,kind,magnitude\n";
        for (const auto& a : r.actions)
            os << d(a.t_issue) << ',' << d(a.t_effect) << ',' << to_string(a.kind) << ','
               << d(a.magnitude) << '\n';
        write_atomic(dir / "events.csv", os.str());
    }
    {
        std::ostringstream os;
        os << "# t: s, f: Hz, pm: pu, pe: pu, pder: pu, shed_total: pu\n"
              "t,f,pm,pe,pder,shed_total\n";
        for (const auto& s : r.trajectory)
            os << d(s.t) << ',' << d(s.f) << ',' << d(s.Pm) << ',' << d(s.Pe) << ',' << d(s.Pder)
               << ',' << d(s.shed_total) << '\n';
        write_atomic(dir / "trajectory.csv", os.str());
    }
    if (plot_data) {
        std::ostringstream os;
        os << "# t: s, f_true: Hz, f_meas: Hz, f_est: Hz, fdot_est: Hz/s\n"
              "t,f_true,f_meas,f_est,fdot_est\n";
        const double dt = r.config.dt;
        for (std::size_t i = 0; i < r.samples.size() && i < r.estimates.size(); ++i) {
            auto idx = static_cast<std::size_t>(std::llround(r.samples[i].t / dt));
            idx = std::min(idx, r.trajectory.size() - 1);
            os << d(r.samples[i].t) << ',' << d(r.trajectory[idx].f) << ','
               << d(r.samples[i].f_meas) << ',' << d(r.estimates[i].f) << ','
               << d(r.estimates[i].fdot) << '\n';
        }
        write_atomic(dir / "plot_data.csv", os.str());

        std::ostringstream ps;
        ps << "# t_made: s, t: s, f_est: Hz, adp: Hz\nt_made,t,f_est,adp\n";
        for (const auto& p : r.predictions)
            for (std::size_t i = 0; i < p.prediction.trajectory.size(); ++i)
                ps << d(p.prediction.t_made) << ',' << d(p.prediction.trajectory[i].t) << ','
                   << d(p.prediction.trajectory[i].f) << ',' << d(p.prediction.adps[i]) << '\n';
        write_atomic(dir / "prediction_trajectories.csv", ps.str());
    }
    write_atomic(dir / "config.json", config_to_json_text(r.config));

    // summary goes last so its presence marks a complete artifact set
    json extra = json::parse(summary_to_json_text(r.summary));
    extra["scenario"] = r.config.name;
    extra["mode"] = to_string(r.config.mode);
    json trig = json::array();
    for (const auto& t : r.triggers)
        trig.push_back({{"t_seconds", t.decision.t},
                        {"kind", t.decision.kind == TriggerKind::Hard ? "hard" : "soft"}});
    extra["triggers"] = trig;
    write_atomic(dir / "summary.json", extra.dump(2) + "\n");
}

std::string summarize_run_dir(const std::filesystem::path& dir) {
    std::ostringstream os;
    const auto summary_path = dir / "summary.json";
    if (!std::filesystem::exists(summary_path)) {
        os << "run: " << dir.string() << "\nERROR: summary.json missing (incomplete run)\n";
        return os.str();
    }
    std::ifstream in(summary_path);
    json j = json::parse(in);
    os << "run: " << j.value("scenario", std::string("?")) << " (" << j.value("mode", std::string("?"))
       << ")\n";
    os << "f_min: " << j["f_min_hz"].get<double>() << " Hz\n";
    os << "f_final: " << j["f_final_hz"].get<double>() << " Hz\n";
    if (j["t_recovery_seconds"].is_null())
        os << "recovery time: never\n";
    else
        os << "recovery time: " << j["t_recovery_seconds"].get<double>() << " s\n";
    os << "total shed: " << j["total_shed_pu"].get<double>() << " pu in "
       << j["shed_count"].get<int>() << " stage(s)\n";
    for (const auto& t : j["triggers"])
        os << "trigger: " << t["kind"].get<std::string>() << " at " << t["t_seconds"].get<double>()
           << " s\n";

    std::ifstream ev(dir / "events.csv");
    std::string line;
    int der_rows = 0;
    while (std::getline(ev, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("t_issue", 0) == 0) continue;
        std::stringstream ls(line);
        std::string t_issue, t_effect, kind, mag;
        std::getline(ls, t_issue, ',');
        std::getline(ls, t_effect, ',');
        std::getline(ls, kind, ',');
        std::getline(ls, mag, ',');
        if (kind == "shed")
            os << "shed: issued " << t_issue << " s, effective " << t_effect << " s, " << mag
               << " pu\n";
        else
            ++der_rows;
    }
    if (der_rows > 0) {
        os << "der commands: " << der_rows;
        if (!j["der_engaged_at_seconds"].is_null())
            os << ", engaged at " << j["der_engaged_at_seconds"].get<double>() << " s";
        os << "\n";
    }

    std::ifstream pr(dir / "predictions.csv");
    std::size_t i = 0;
    const auto& errs = j["prediction_errors_hz"];
    while (std::getline(pr, line)) {
        if (line.empty() || line[0] == '#' || line.rfind("t_made", 0) == 0) continue;
        std::stringstream ls(line);
        std::string t_made, f1, fp, tp;
        std::getline(ls, t_made, ',');
        std::getline(ls, f1, ',');
        std::getline(ls, fp, ',');
        std::getline(ls, tp, ',');
        os << "prediction at " << t_made << " s: f1 " << f1 << " Hz, f_p " << fp << " Hz";
        if (i < errs.size() && !errs[i].is_null())
            os << ", horizon error " << errs[i].get<double>() << " Hz";
        os << "\n";
        ++i;
    }
    if (!j["error"].is_null()) os << "ERROR: " << j["error"].get<std::string>() << "\n";
    return os.str();
}

}  // namespace ufls
