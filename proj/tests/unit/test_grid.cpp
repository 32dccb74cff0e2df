#include <catch_amalgamated.hpp>

#include <cmath>

#include "ufls/grid.hpp"

using namespace ufls;
using Catch::Approx;

namespace {

GridParams frozen_governor() {
    GridParams p;
    p.H = 3.0;
    p.D = 0.0;
    p.governor_enabled = false;
    return p;
}

double f_at(const std::vector<GridState>& traj, double t, double dt) {
    return traj[static_cast<std::size_t>(std::llround(t / dt)) - 1].f;
}

}  // namespace

TEST_CASE("equilibrium stays put", "[grid]") {
    GridParams p;
    const GridState s = equilibrium_state(p, 0.8);
    CHECK(s.Pm == 0.8);
    CHECK(s.Pe == 0.8);
    EventQueue q;
    const auto traj = run_until(s, p, q, 5.0, 1e-3);
    REQUIRE(traj.size() == 5000);
    for (const auto& st : traj) REQUIRE(st.f == 60.0);
}

TEST_CASE("constant deficit without governor gives the closed-form ROCOF", "[grid]") {
    const GridParams p = frozen_governor();
    EventQueue q({{0.0, EventKind::GenerationLoss, 0.1}});
    const auto traj = run_until(equilibrium_state(p, 1.0), p, q, 2.0, 1e-3);
    // linear ODE: f(t) = 60 - t exactly
    CHECK(f_at(traj, 1.0, 1e-3) == Approx(59.0).epsilon(1e-12));
    CHECK(f_at(traj, 2.0, 1e-3) == Approx(58.0).epsilon(1e-12));
}

TEST_CASE("shedding the deficit restores balance", "[grid]") {
    GridParams p = frozen_governor();
    p.D = 5.0;
    EventQueue q({{0.0, EventKind::GenerationLoss, 0.05}, {1.0, EventKind::Shed, 0.05}});
    const auto traj = run_until(equilibrium_state(p, 1.0), p, q, 30.0, 1e-3);
    const double late_rate = (traj.back().f - f_at(traj, 29.0, 1e-3)) / 1.0;
    CHECK(std::abs(late_rate) < 1e-4);
    CHECK(traj.back().f == Approx(60.0).margin(1e-4));
    CHECK(traj.back().shed_total == Approx(0.05));
    CHECK(traj.back().Pe == Approx(0.95));
}

TEST_CASE("step size convergence", "[grid]") {
    GridParams p;
    p.D = 1.0;
    auto final_f = [&](double dt) {
        EventQueue q({{0.5, EventKind::GenerationLoss, 0.08}});
        return run_until(equilibrium_state(p, 1.0), p, q, 5.0, dt).back().f;
    };
    CHECK(std::abs(final_f(1e-3) - final_f(5e-4)) < 1e-4);
}

TEST_CASE("governor pulls frequency toward the droop steady state", "[grid]") {
    GridParams p;
    p.D = 2.0;
    p.droop = 0.05;
    p.Tg = 2.0;
    EventQueue q({{0.0, EventKind::GenerationLoss, 0.05}});
    const auto traj = run_until(equilibrium_state(p, 1.0), p, q, 60.0, 1e-3);
    const double K = (p.D + 1.0 / p.droop) / p.f0;  // pu per Hz
    CHECK(traj.back().f == Approx(60.0 - 0.05 / K).margin(1e-3));
}

TEST_CASE("degenerate windows", "[grid]") {
    GridParams p;
    EventQueue q;
    GridState s = equilibrium_state(p, 1.0);
    s.t = 2.0;
    CHECK(run_until(s, p, q, 2.0, 1e-3).empty());
    CHECK(run_until(s, p, q, 1.0, 1e-3).empty());
}

TEST_CASE("zero shed is a no-op", "[grid]") {
    GridParams p;
    EventQueue a({{0.2, EventKind::GenerationLoss, 0.05}});
    EventQueue b({{0.2, EventKind::GenerationLoss, 0.05}, {0.5, EventKind::Shed, 0.0}});
    const auto ta = run_until(equilibrium_state(p, 1.0), p, a, 2.0, 1e-3);
    const auto tb = run_until(equilibrium_state(p, 1.0), p, b, 2.0, 1e-3);
    REQUIRE(ta.size() == tb.size());
    for (std::size_t i = 0; i < ta.size(); ++i) REQUIRE(ta[i].f == tb[i].f);
}

TEST_CASE("decline is monotone until actuation", "[grid]") {
    GridParams p;
    p.H = 5.0;
    p.D = 3.0;
    p.droop = 0.05;
    p.Tg = 10.0;
    EventQueue q({{1.5, EventKind::GenerationLoss, 0.1}});
    const auto traj = run_until(equilibrium_state(p, 1.0), p, q, 3.5, 1e-3);
    for (std::size_t i = 1; i < traj.size(); ++i) {
        if (traj[i].t <= 1.5) {
            REQUIRE(traj[i].f == 60.0);
        } else {
            REQUIRE(traj[i].f < traj[i - 1].f);
        }
    }
}

TEST_CASE("event ordering and timing", "[grid]") {
    EventQueue q;
    q.insert({2.0, EventKind::Shed, 0.01});
    q.insert({1.0, EventKind::LoadStep, 0.02});
    q.insert({2.0, EventKind::Shed, 0.03});
    REQUIRE(q.size() == 3);
    CHECK(q.pending()[0].at == 1.0);
    CHECK(q.pending()[1].magnitude == 0.01);
    CHECK(q.pending()[2].magnitude == 0.03);
    const auto due = q.pop_before(2.0);
    CHECK(due.size() == 1);
    CHECK(q.size() == 2);
}

TEST_CASE("actuation latency", "[grid]") {
    EventQueue q;
    apply_actuation(q, {2.5, 3.5, EventKind::Shed, 0.05}, 2.5);
    REQUIRE(q.size() == 1);
    CHECK(q.pending()[0].at == 3.5);
    apply_actuation(q, {2.0, 2.5, EventKind::DerSetpoint, 0.01}, 2.0);
    CHECK(q.pending()[0].at == 2.5);
    CHECK_THROWS_AS(apply_actuation(q, {3.0, 2.9, EventKind::Shed, 0.01}, 3.0), LatencyViolation);
}

TEST_CASE("DER setpoint replaces rather than accumulates", "[grid]") {
    GridState s = equilibrium_state(GridParams{}, 1.0);
    apply_event(s, {0.0, EventKind::DerSetpoint, 0.02});
    apply_event(s, {0.0, EventKind::DerSetpoint, 0.01});
    CHECK(s.Pder == 0.01);
    apply_event(s, {0.0, EventKind::Shed, 0.02});
    apply_event(s, {0.0, EventKind::Shed, 0.01});
    CHECK(s.shed_total == Approx(0.03));
    CHECK(s.Pe == Approx(0.97));
}

TEST_CASE("faults on impossible states", "[grid]") {
    GridParams p;
    EventQueue q({{0.0, EventKind::Shed, 2.0}});
    CHECK_THROWS_AS(run_until(equilibrium_state(p, 1.0), p, q, 1.0, 1e-3), SimulationFault);

    GridParams bad;
    bad.H = 0.0;
    CHECK_THROWS(bad.validate());
    bad = GridParams{};
    bad.pf = 1.5;
    CHECK_THROWS(bad.validate());
}

TEST_CASE("event kinds round-trip through strings", "[grid]") {
    for (auto k : {EventKind::GenerationLoss, EventKind::LoadStep, EventKind::Shed,
                   EventKind::DerSetpoint})
        CHECK(event_kind_from_string(to_string(k)) == k);
    CHECK_THROWS(event_kind_from_string("meteor"));
}
