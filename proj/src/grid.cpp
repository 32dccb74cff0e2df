#include "ufls/grid.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ufls {

void GridParams::validate() const {
    auto bad = [](const std::string& what) { throw std::invalid_argument("grid: " + what); };
    if (!(f0 > 0)) bad("f0 must be > 0");
    if (!(H > 0)) bad("H must be > 0");
    if (!(Tg > 0)) bad("Tg must be > 0");
    if (!(droop > 0)) bad("droop must be > 0");
    if (!(pf > 0 && pf <= 1)) bad("power factor must be in (0, 1]");
    if (!(D >= 0)) bad("D must be >= 0");
    if (!(sbase > 0)) bad("sbase must be > 0");
}

GridState equilibrium_state(const GridParams& p, double load_pu) {
    GridState s;
    s.f = p.f0;
    s.Pm = s.Pm_ref = s.Pe = load_pu;
    return s;
}

const char* to_string(EventKind k) {
    switch (k) {
        case EventKind::GenerationLoss: return "generation-loss";
        case EventKind::LoadStep: return "load-step";
        case EventKind::Shed: return "shed";
        case EventKind::DerSetpoint: return "der-setpoint";
    }
    return "?";
}

EventKind event_kind_from_string(const std::string& s) {
    if (s == "generation-loss") return EventKind::GenerationLoss;
    if (s == "load-step") return EventKind::LoadStep;
    if (s == "shed") return EventKind::Shed;
    if (s == "der-setpoint") return EventKind::DerSetpoint;
    throw std::invalid_argument("unknown event kind '" + s + "'");
}

EventQueue::EventQueue(std::vector<GridEvent> events) {
    for (const auto& e : events) insert(e);
}

void EventQueue::insert(const GridEvent& e) {
    auto it = std::upper_bound(pending_.begin(), pending_.end(), e.at,
                               [](double at, const GridEvent& x) { return at < x.at; });
    pending_.insert(it, e);
}

std::vector<GridEvent> EventQueue::pop_before(double t_limit) {
    auto it = std::find_if(pending_.begin(), pending_.end(),
                           [&](const GridEvent& e) { return !(e.at < t_limit); });
    std::vector<GridEvent> out(pending_.begin(), it);
    pending_.erase(pending_.begin(), it);
    return out;
}

void apply_event(GridState& s, const GridEvent& e) {
    switch (e.kind) {
        case EventKind::GenerationLoss:
            s.Pm -= e.magnitude;
            s.Pm_ref -= e.magnitude;
            break;
        case EventKind::LoadStep:
            s.Pe += e.magnitude;
            break;
        case EventKind::Shed:
            s.Pe -= e.magnitude;
            s.shed_total += e.magnitude;
            break;
        case EventKind::DerSetpoint:
            s.Pder = e.magnitude;
            break;
    }
}

namespace {

struct Deriv {
    double df;
    double dPm;
};

Deriv rhs(const GridParams& p, const GridState& s, double f, double Pm) {
    double dev = (f - p.f0) / p.f0;
    Deriv d;
    d.df = p.f0 / (2.0 * p.H) * (Pm + s.Pder - s.Pe - p.D * dev);
    d.dPm = p.governor_enabled ? ((s.Pm_ref - dev / p.droop) - Pm) / p.Tg : 0.0;
    return d;
}

void check(const GridState& s) {
    auto fail = [&](const char* what) {
        std::ostringstream os;
        os.precision(17);
        os << "simulation fault at t=" << s.t << ": " << what << " (f=" << s.f << ", Pm=" << s.Pm
           << ", Pe=" << s.Pe << ", Pder=" << s.Pder << ")";
        throw SimulationFault(os.str());
    };
    if (!std::isfinite(s.f) || !std::isfinite(s.Pm) || !std::isfinite(s.Pe) ||
        !std::isfinite(s.Pder) || !std::isfinite(s.shed_total))
        fail("non-finite state");
    if (!(s.f > 0)) fail("frequency collapsed");
    if (s.Pe < 0) fail("negative load");
    if (s.Pder < 0) fail("negative DER injection");
}

}  // namespace

void apply_due_events(GridState& s, EventQueue& events, double dt) {
    // tolerance keeps events computed as t + delay from slipping a step late
    for (const auto& e : events.pop_before(s.t + dt * (1.0 - 1e-6))) apply_event(s, e);
    check(s);
}

GridState integrate(const GridState& s0, const GridParams& p, double dt) {
    if (!(dt > 0)) throw std::invalid_argument("step: dt must be > 0");
    GridState s = s0;
    const double f = s.f, Pm = s.Pm;
    Deriv k1 = rhs(p, s, f, Pm);
    Deriv k2 = rhs(p, s, f + 0.5 * dt * k1.df, Pm + 0.5 * dt * k1.dPm);
    Deriv k3 = rhs(p, s, f + 0.5 * dt * k2.df, Pm + 0.5 * dt * k2.dPm);
    Deriv k4 = rhs(p, s, f + dt * k3.df, Pm + dt * k3.dPm);
    s.f = f + dt / 6.0 * (k1.df + 2 * k2.df + 2 * k3.df + k4.df);
    s.Pm = Pm + dt / 6.0 * (k1.dPm + 2 * k2.dPm + 2 * k3.dPm + k4.dPm);
    s.t = s0.t + dt;
    check(s);
    return s;
}

GridState step(const GridState& s0, const GridParams& p, EventQueue& events, double dt) {
    if (!(dt > 0)) throw std::invalid_argument("step: dt must be > 0");
    GridState s = s0;
    apply_due_events(s, events, dt);
    return integrate(s, p, dt);
}

std::vector<GridState> run_until(const GridState& s, const GridParams& p, EventQueue& events,
                                 double t_end, double dt) {
    std::vector<GridState> out;
    if (!(dt > 0)) throw std::invalid_argument("run_until: dt must be > 0");
    if (!(t_end > s.t)) return out;
    const auto n = static_cast<long>(std::llround((t_end - s.t) / dt));
    out.reserve(static_cast<std::size_t>(n));
    GridState cur = s;
    for (long k = 0; k < n; ++k) {
        cur = step(cur, p, events, dt);
        cur.t = s.t + static_cast<double>(k + 1) * dt;  // no accumulated drift
        out.push_back(cur);
    }
    return out;
}

void apply_actuation(EventQueue& events, const Actuation& a, double t_now) {
    if (a.t_effect < t_now - 1e-9) {
        std::ostringstream os;
        os << "actuation effect time " << a.t_effect << " is before current time " << t_now;
        throw LatencyViolation(os.str());
    }
    if (a.magnitude < 0) throw std::invalid_argument("actuation magnitude must be >= 0");
    events.insert(GridEvent{a.t_effect, a.kind, a.magnitude});
}

}  // namespace ufls
