#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace ufls {

struct GridParams {
    double f0 = 60.0;        // Hz
    double H = 3.0;          // s
    double D = 0.0;          // pu power per pu frequency
    double droop = 0.08;     // pu
    double Tg = 2.5;         // s
    bool governor_enabled = true;  // false models the Tg -> inf limit
    double pf = 1.0;
    double sbase = 1.0;

    void validate() const;
};

struct GridState {
    double t = 0.0;
    double f = 60.0;
    double Pm = 1.0;
    double Pm_ref = 1.0;  // governor set-point; generation loss lowers it too
    double Pe = 1.0;
    double Pder = 0.0;
    double shed_total = 0.0;
};

GridState equilibrium_state(const GridParams& p, double load_pu);

enum class EventKind { GenerationLoss, LoadStep, Shed, DerSetpoint };

const char* to_string(EventKind k);
EventKind event_kind_from_string(const std::string& s);

struct GridEvent {
    double at = 0.0;
    EventKind kind = EventKind::LoadStep;
    double magnitude = 0.0;
};

class SimulationFault : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class LatencyViolation : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Time-ordered pending events. Ties keep insertion order.
class EventQueue {
public:
    EventQueue() = default;
    explicit EventQueue(std::vector<GridEvent> events);

    void insert(const GridEvent& e);
    bool empty() const { return pending_.empty(); }
    std::size_t size() const { return pending_.size(); }
    const std::vector<GridEvent>& pending() const { return pending_; }

    // Removes and returns every event with at < t_limit.
    std::vector<GridEvent> pop_before(double t_limit);

private:
    std::vector<GridEvent> pending_;
};

void apply_event(GridState& s, const GridEvent& e);

// Applies pending events that fall inside [s.t, s.t + dt).
void apply_due_events(GridState& s, EventQueue& events, double dt);
// One RK4 step of the continuous dynamics, no event handling.
GridState integrate(const GridState& s, const GridParams& p, double dt);

// One RK4 step. Events inside [s.t, s.t + dt) are applied first.
GridState step(const GridState& s, const GridParams& p, EventQueue& events, double dt);

// States after each step, s.t + dt ... t_end. Empty when t_end <= s.t.
std::vector<GridState> run_until(const GridState& s, const GridParams& p, EventQueue& events,
                                 double t_end, double dt);

struct Actuation {
    double t_issue = 0.0;
    double t_effect = 0.0;
    EventKind kind = EventKind::Shed;
    double magnitude = 0.0;
};

// Throws LatencyViolation when the effect time is already past.
void apply_actuation(EventQueue& events, const Actuation& a, double t_now);

}  // namespace ufls
