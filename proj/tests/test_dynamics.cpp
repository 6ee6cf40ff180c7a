#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <vector>

#include "swarm3d/dynamics.hpp"
#include "swarm3d/scenarios.hpp"

using namespace swarm3d;

namespace {

SimParams free_flight() {
    SimParams p;
    p.potential = PotentialKind::none;
    p.damping = {0.0, 0.0};
    return p;
}

double max_abs_z(const TrajectoryLog& log) {
    double m = 0;
    for (const auto& st : log.states)
        for (const auto& a : st) m = std::max({m, std::abs(a.x.z), std::abs(a.v.z)});
    return m;
}

}  // namespace

TEST(Rhs, FreeAgentHasNoAcceleration) {
    const std::vector<AgentState> s{{0, {1, 2, 3}, {0.5, -1, 2}, {}}};
    const auto d = rhs(s, {}, free_flight(), 1e-6);
    EXPECT_EQ(d[0].dx, s[0].v);
    EXPECT_EQ(d[0].dv, (Vec3{}));
}

TEST(Rhs, AblationLeavesExternalForceOnly) {
    SimParams p;
    p.avoidance_enabled = false;
    const std::vector<AgentState> s{{0, {0, 0, 0}, {1, 0, 0}, {3, 0, 0}},
                                    {1, {2, 1, 0}, {-1, 0, 0}, {0, 0, 0}}};
    const auto d = rhs(s, {}, p, 1e-6);
    for (std::size_t i = 0; i < 2; ++i) {
        EXPECT_EQ(d[i].dv, external_force(p.potential, p.damping, s[i].x, s[i].v, s[i].target));
    }
}

TEST(Rhs, OffsetPairComposesForces) {
    SimParams p;
    const std::vector<AgentState> s{{0, {0, 0, 0}, {1, 0, 0}, {3, 0, 0}},
                                    {1, {2, 1, 0}, {-1, 0, 0}, {0, 0, 0}}};
    const auto d = rhs(s, {}, p, 0.0);
    const Vec3 expected = Vec3{0, -4 * std::numbers::pi * std::exp(-1.0), 0} +
                          external_force(p.potential, p.damping, s[0].x, s[0].v, s[0].target);
    EXPECT_NEAR(norm(d[0].dv - expected), 0.0, 1e-12);
}

TEST(Step, FreeAgentMovesStraight) {
    World w{0.0, {{0, {0, 0, 0}, {1, 2, 3}, {}}}, {}};
    std::mt19937_64 rng(1);
    step(w, free_flight(), 0.0, rng);
    EXPECT_NEAR(w.agents[0].x.x, 0.01, 1e-17);
    EXPECT_NEAR(w.agents[0].x.y, 0.02, 1e-17);
    EXPECT_NEAR(w.agents[0].x.z, 0.03, 1e-17);
    EXPECT_EQ(w.agents[0].v, (Vec3{1, 2, 3}));
}

TEST(Step, PureFrictionMatchesExponential) {
    for (bool projection : {true, false}) {
        SimParams p = free_flight();
        p.damping.sigma = 0.25;
        p.speed_projection = projection;
        World w{0.0, {{0, {0, 0, 0}, {1, -2, 0.5}, {}}}, {}};
        std::mt19937_64 rng(1);
        for (int n = 0; n < 100; ++n) step(w, p, 0.0, rng);
        const Vec3 expected = std::exp(-0.25) * Vec3{1, -2, 0.5};
        EXPECT_NEAR(norm(w.agents[0].v - expected), 0.0, 1e-10);
    }
}

TEST(Step, NonFiniteStateAborts) {
    World w{0.0, {{0, {0, 0, 0}, {std::numeric_limits<double>::quiet_NaN(), 0, 0}, {}}}, {}};
    std::mt19937_64 rng(1);
    EXPECT_THROW(step(w, SimParams{}, 0.0, rng), SimulationAborted);
}

TEST(Run, ZeroHorizonKeepsInitialState) {
    auto s = circle_scenario(3, 0.5);
    s.params.t_end = 0;
    const auto log = run(s.world(), s.params);
    ASSERT_EQ(log.times.size(), 1u);
    EXPECT_EQ(log.states[0].size(), 3u);
    EXPECT_EQ(log.steps, 0u);
}

TEST(Run, SamplingAndTimes) {
    auto s = circle_scenario(2, 0.5);
    s.params.t_end = 1.05;
    const auto log = run(s.world(), s.params);
    ASSERT_EQ(log.steps, 105u);
    EXPECT_EQ(log.times.size(), 12u);
    EXPECT_NEAR(log.times.back(), 1.05, 1e-12);
    for (std::size_t k = 1; k < log.times.size(); ++k) EXPECT_GT(log.times[k], log.times[k - 1]);
}

TEST(Run, InvalidStepThrows) {
    SimParams p;
    p.dt = 0;
    EXPECT_THROW(step_count(p), ConfigError);
    p.dt = 0.01;
    p.t_end = -1;
    EXPECT_THROW(step_count(p), ConfigError);
}

TEST(Run, AvoidanceKeepsHeadOnPairApart) {
    auto s = circle_scenario(2, 0.5);
    const auto on = run(s.world(), s.params);
    s.params.avoidance_enabled = false;
    const auto off = run(s.world(), s.params);
    EXPECT_GT(on.min_pair_dist, off.min_pair_dist);
}

TEST(Run, ObstacleScenarioHasNoPenetration) {
    const auto s = obstacles_scenario(8, 1);
    EXPECT_TRUE(run(s.world(), s.params).penetrations.empty());
}

TEST(Run, DeterministicIncludingNoise) {
    auto s = obstacles_scenario(8, 3);
    s.params.damping.nu = 0.05;
    s.params.t_end = 5;
    const auto a = run(s.world(), s.params);
    const auto b = run(s.world(), s.params);
    ASSERT_EQ(a.states.size(), b.states.size());
    for (std::size_t k = 0; k < a.states.size(); ++k)
        for (std::size_t i = 0; i < a.states[k].size(); ++i) {
            EXPECT_EQ(a.states[k][i].x, b.states[k][i].x);
            EXPECT_EQ(a.states[k][i].v, b.states[k][i].v);
        }
    EXPECT_EQ(a.eps_draw, b.eps_draw);
}

TEST(Energy, Examples) {
    const std::vector<AgentState> one{{0, {1, 2, 3}, {0, 0, 0}, {1, 2, 3}}};
    EXPECT_DOUBLE_EQ(energy(one, PotentialKind::smooth).total, 0.25);
    const std::vector<AgentState> a{{0, {1, 0, 0}, {0.5, 1, 0}, {3, 0, 0}}};
    const std::vector<AgentState> aa{a[0], {1, a[0].x, a[0].v, a[0].target}};
    EXPECT_DOUBLE_EQ(energy(aa, PotentialKind::smooth).total,
                     2 * energy(a, PotentialKind::smooth).total);
}

TEST(Energy, DissipationIdentityOnCircleRuns) {
    for (int n : {2, 3, 4, 9}) {
        const auto s = circle_scenario(n, 0.5);
        const auto log = run(s.world(), s.params);
        for (std::size_t k = 1; k < log.diagnostics.size(); ++k) {
            const auto& d0 = log.diagnostics[k - 1];
            const auto& d1 = log.diagnostics[k];
            EXPECT_LE(d1.energy, d0.energy + 1e-12) << "N=" << n << " t=" << d1.t;
            const double residual = (d1.energy - d0.energy) + (d1.dissipated - d0.dissipated);
            EXPECT_LE(std::abs(residual), 1e-4) << "N=" << n << " t=" << d1.t;
        }
    }
}

TEST(Invariants, SpeedConservedUnderPureAvoidance) {
    for (int n : {2, 3, 9}) {
        auto s = circle_scenario(n, 0.5);
        s.params.potential = PotentialKind::none;
        s.params.damping = {0.0, 0.0};
        s.params.t_end = 10;
        const auto log = run(s.world(), s.params);
        for (const auto& st : log.states)
            for (std::size_t i = 0; i < st.size(); ++i)
                EXPECT_NEAR(norm(st[i].v), norm(s.agents[i].v), 1e-6);
    }
}

TEST(Invariants, PlanarRunsStayPlanar) {
    for (int n : {2, 3, 4, 9}) {
        const auto s = circle_scenario(n, 0.5);
        EXPECT_LE(max_abs_z(run(s.world(), s.params)), 1e-10);
    }
    for (int n : {2, 3}) {
        const auto s = overtake_scenario(n);
        EXPECT_LE(max_abs_z(run(s.world(), s.params)), 1e-10);
    }
}

TEST(Invariants, TranslationAndZRotationCommuteWithRun) {
    auto obstacles = obstacles_scenario(8, 0);
    obstacles.params.t_end = 10;
    auto circle = circle_scenario(3, 0.5);
    const double angle = 0.7;
    const Vec3 shift{3, -2, 1.5};
    for (const auto& base : {obstacles, circle}) {
        auto moved = base;
        for (auto& a : moved.agents) {
            a.x = rotate_z(a.x, angle) + shift;
            a.v = rotate_z(a.v, angle);
            a.target = rotate_z(a.target, angle) + shift;
        }
        for (auto& o : moved.obstacles) {
            o.center = rotate_z(o.center, angle) + shift;
        }
        const auto l0 = run(base.world(), base.params);
        const auto l1 = run(moved.world(), moved.params);
        for (std::size_t k = 0; k < l0.states.size(); ++k)
            for (std::size_t i = 0; i < l0.states[k].size(); ++i) {
                const Vec3 expected = rotate_z(l0.states[k][i].x, angle) + shift;
                EXPECT_LE(norm(l1.states[k][i].x - expected), 1e-8) << base.name;
            }
    }
}
