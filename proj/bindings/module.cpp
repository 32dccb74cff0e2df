#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "ufls/controller.hpp"
#include "ufls/grid.hpp"
#include "ufls/measurement.hpp"
#include "ufls/particle_filter.hpp"
#include "ufls/predictor.hpp"
#include "ufls/scenario.hpp"

namespace py = pybind11;
using namespace ufls;

namespace {

py::dict summary_dict(const RunSummary& s) {
    py::dict d;
    d["f_min"] = s.f_min;
    d["f_final"] = s.f_final;
    d["t_recovery"] = s.t_recovery;
    d["total_shed"] = s.total_shed;
    d["shed_count"] = s.shed_count;
    d["der_command_count"] = s.der_command_count;
    d["prediction_errors"] = s.prediction_errors;
    d["der_engaged_at"] = s.der_engaged_at;
    d["dropped_after_end"] = s.dropped_after_end;
    d["error"] = s.error.empty() ? py::object(py::none()) : py::object(py::str(s.error));
    return d;
}

// Plain-Python view of a run: columns as lists so numpy/pandas can take them directly.
py::dict result_dict(const RunResult& r) {
    py::dict d;
    std::vector<double> t, f, pm, pe, pder;
    for (const auto& s : r.trajectory) {
        t.push_back(s.t);
        f.push_back(s.f);
        pm.push_back(s.Pm);
        pe.push_back(s.Pe);
        pder.push_back(s.Pder);
    }
    d["trajectory"] = py::dict(py::arg("t") = t, py::arg("f") = f, py::arg("Pm") = pm,
                               py::arg("Pe") = pe, py::arg("Pder") = pder);

    std::vector<double> st, sf;
    for (const auto& z : r.samples) {
        st.push_back(z.t);
        sf.push_back(z.f_meas);
    }
    d["samples"] = py::dict(py::arg("t") = st, py::arg("f_meas") = sf);

    std::vector<double> et, ef, ed;
    for (const auto& e : r.estimates) {
        et.push_back(e.t);
        ef.push_back(e.f);
        ed.push_back(e.fdot);
    }
    d["estimates"] = py::dict(py::arg("t") = et, py::arg("f_est") = ef, py::arg("fdot_est") = ed);

    py::list preds;
    for (const auto& p : r.predictions)
        preds.append(py::dict(py::arg("t_made") = p.prediction.t_made,
                              py::arg("f1") = p.prediction.f1, py::arg("f_p") = p.prediction.f_p,
                              py::arg("t_p") = p.prediction.t_p,
                              py::arg("f_true_at_horizon") = p.f_true_at_horizon));
    d["predictions"] = preds;

    py::list acts;
    for (const auto& a : r.actions)
        acts.append(py::dict(py::arg("t_issue") = a.t_issue, py::arg("t_effect") = a.t_effect,
                             py::arg("kind") = to_string(a.kind),
                             py::arg("magnitude") = a.magnitude));
    d["actions"] = acts;

    py::list trig;
    for (const auto& tr : r.triggers)
        trig.append(py::dict(py::arg("t") = tr.decision.t,
                             py::arg("kind") = tr.decision.kind == TriggerKind::Hard ? "hard" : "soft",
                             py::arg("R") = tr.decision.R));
    d["triggers"] = trig;
    d["summary"] = summary_dict(r.summary);
    return d;
}

ScenarioConfig resolve(const py::object& cfg) {
    if (py::isinstance<py::str>(cfg)) {
        const auto s = cfg.cast<std::string>();
        for (const auto& name : preset_names())
            if (s == name) return preset(s);
        return config_from_json_text(s);
    }
    return cfg.cast<ScenarioConfig>();
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Frequency-prediction load shedding simulator";

    py::register_exception<ConfigError>(m, "ConfigError", PyExc_ValueError);
    py::register_exception<SimulationFault>(m, "SimulationFault", PyExc_RuntimeError);
    py::register_exception<LatencyViolation>(m, "LatencyViolation", PyExc_RuntimeError);

    m.def("rocof", &rocof, py::arg("f1"), py::arg("f2"), py::arg("dt"));
    m.def("load_excess", &load_excess, py::arg("R_p"), py::arg("H"), py::arg("p"), py::arg("f1"),
          py::arg("f_p"));
    m.def("num_adps", &num_adps, py::arg("t_p"), py::arg("f_s"));
    m.def("generate_adps", &generate_adps, py::arg("last"), py::arg("fprime"), py::arg("fsecond"),
          py::arg("n"), py::arg("t_s"));
    m.def(
        "estimate_derivatives",
        [](const std::vector<double>& f, double t_s) {
            DerivativeWindow w;
            w.t_s = t_s;
            for (std::size_t i = 0; i < f.size(); ++i)
                w.samples.push_back({static_cast<double>(i) * t_s, f[i], 0.0});
            const Derivatives d = estimate_derivatives(w);
            return py::make_tuple(d.fprime, d.fsecond);
        },
        py::arg("f"), py::arg("t_s") = 1.0 / 30.0,
        "(fprime, fsecond) from the last ten uniformly spaced estimates");
    m.def(
        "check_trigger",
        [](const std::vector<double>& f, double rate, double f_hard) -> py::object {
            std::vector<FrequencySample> s;
            for (std::size_t i = 0; i < f.size(); ++i)
                s.push_back({static_cast<std::int64_t>(i), static_cast<double>(i) / rate, f[i]});
            Thresholds th;
            th.f_hard = f_hard;
            const auto d = check_trigger(s, th);
            if (!d) return py::none();
            return py::make_tuple(d->t, d->kind == TriggerKind::Hard ? "hard" : "soft");
        },
        py::arg("f"), py::arg("rate") = 30.0, py::arg("f_hard") = 59.3,
        "Trip time and kind for a measured stream, or None");

    py::class_<GridParams>(m, "GridParams")
        .def(py::init<>())
        .def_readwrite("f0", &GridParams::f0)
        .def_readwrite("H", &GridParams::H)
        .def_readwrite("D", &GridParams::D)
        .def_readwrite("droop", &GridParams::droop)
        .def_readwrite("Tg", &GridParams::Tg)
        .def_readwrite("governor_enabled", &GridParams::governor_enabled)
        .def_readwrite("pf", &GridParams::pf);

    m.def(
        "simulate_grid",
        [](const GridParams& p, const std::vector<std::tuple<double, std::string, double>>& events,
           double t_end, double dt, double load) {
            std::vector<GridEvent> ev;
            for (const auto& [at, kind, mag] : events) ev.push_back({at, event_kind_from_string(kind), mag});
            EventQueue q(ev);
            const auto traj = run_until(equilibrium_state(p, load), p, q, t_end, dt);
            std::vector<double> t, f;
            for (const auto& s : traj) {
                t.push_back(s.t);
                f.push_back(s.f);
            }
            return py::make_tuple(t, f);
        },
        py::arg("params"), py::arg("events"), py::arg("t_end"), py::arg("dt") = 1e-3,
        py::arg("load") = 1.0, "Open-loop grid response: (t, f) lists");

    py::class_<FilterConfig>(m, "FilterConfig")
        .def(py::init<>())
        .def_readwrite("n_particles", &FilterConfig::n_particles)
        .def_readwrite("q_f", &FilterConfig::q_f)
        .def_readwrite("q_fdot", &FilterConfig::q_fdot)
        .def_readwrite("rm", &FilterConfig::rm)
        .def_readwrite("seed", &FilterConfig::seed);

    py::class_<ParticleFilter>(m, "ParticleFilter")
        .def(py::init<const FilterConfig&, double, double, double, double>(), py::arg("config"),
             py::arg("f_prior"), py::arg("spread"), py::arg("fdot_prior") = 0.0, py::arg("t0") = 0.0)
        .def("propagate", &ParticleFilter::propagate, py::arg("dt"))
        .def("update_weights", &ParticleFilter::update_weights, py::arg("z"))
        .def("resample", &ParticleFilter::resample)
        .def("estimate",
             [](const ParticleFilter& pf) {
                 const Estimate e = pf.estimate();
                 return py::make_tuple(e.f, e.fdot);
             })
        .def(
            "assimilate",
            [](ParticleFilter& pf, double t, double z) {
                const Estimate e = pf.assimilate({0, t, z});
                return py::make_tuple(e.f, e.fdot);
            },
            py::arg("t"), py::arg("z"))
        .def("weight_sum", &ParticleFilter::weight_sum)
        .def("clone", [](const ParticleFilter& pf) { return ParticleFilter(pf); })
        .def_property_readonly("time", &ParticleFilter::time)
        .def("__len__", &ParticleFilter::size);

    m.def(
        "measure",
        [](const std::vector<double>& f_true, double variance, std::uint64_t seed, double rate) {
            Pmu pmu(NoiseModel{variance, seed}, rate);
            std::vector<double> out;
            for (double f : f_true) out.push_back(pmu.measure(f).f_meas);
            return out;
        },
        py::arg("f_true"), py::arg("variance") = 0.025, py::arg("seed") = 1,
        py::arg("rate") = 30.0, "Noisy PMU readings of the given true values");

    py::class_<ScenarioConfig>(m, "ScenarioConfig")
        .def_readwrite("name", &ScenarioConfig::name)
        .def_readwrite("t_end", &ScenarioConfig::t_end)
        .def_property(
            "noise_seed", [](const ScenarioConfig& c) { return c.noise.seed; },
            [](ScenarioConfig& c, std::uint64_t s) { c.noise.seed = s; })
        .def_property(
            "filter_seed", [](const ScenarioConfig& c) { return c.filter.seed; },
            [](ScenarioConfig& c, std::uint64_t s) { c.filter.seed = s; })
        .def_property_readonly("mode", [](const ScenarioConfig& c) { return to_string(c.mode); })
        .def("to_json", &config_to_json_text)
        .def_static("from_json", &config_from_json_text, py::arg("text"));

    m.def("preset", &preset, py::arg("name"));
    m.def("preset_names", &preset_names);
    m.def("load_config", [](const std::string& path) { return load_config(path); }, py::arg("path"));
    m.def(
        "run_scenario", [](const py::object& cfg) { return result_dict(run_scenario(resolve(cfg))); },
        py::arg("config"),
        "Run a ScenarioConfig, a preset name or JSON text; returns plain dicts and lists");
    m.def(
        "run_to_dir",
        [](const py::object& cfg, const std::string& dir, bool plot_data) {
            const RunResult r = run_scenario(resolve(cfg));
            write_artifacts(r, dir, plot_data);
            return summary_dict(r.summary);
        },
        py::arg("config"), py::arg("dir"), py::arg("plot_data") = false);
    m.def("summarize", [](const std::string& dir) { return summarize_run_dir(dir); }, py::arg("dir"));
}
