// Equations of motion, the fixed-step integrator and run-level diagnostics.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <random>
#include <span>
#include <sstream>
#include <vector>

#include "swarm3d/agent.hpp"
#include "swarm3d/avoidance.hpp"
#include "swarm3d/error.hpp"
#include "swarm3d/external.hpp"
#include "swarm3d/geometry.hpp"
#include "swarm3d/perception.hpp"
#include "swarm3d/vec3.hpp"

namespace swarm3d {

struct SimParams {
    PerceptionParams perception;
    AvoidanceParams avoidance;
    DampingNoise damping;
    PotentialKind potential = PotentialKind::smooth;
    double dt = 0.01;
    double t_end = 40.0;
    double output_interval = 0.1;
    std::uint64_t seed = 0;
    bool avoidance_enabled = true;
    /// Rescale velocities after each step so that |v|^2 changes only through the
    /// non-gyroscopic forces (see step()).
    bool speed_projection = true;
};

struct World {
    double t = 0.0;
    AgentList agents;
    std::vector<ObstacleSpec> obstacles;
};

struct AgentDerivative {
    Vec3 dx;
    Vec3 dv;
    /// <v, external force>: the only contribution to d|v|^2/dt / 2, since every
    /// avoidance term is perpendicular to v.
    double power = 0.0;
};

/// Deterministic right-hand side: dx/dt = v, dv/dt = avoidance + obstacles + external.
/// Interaction sets are evaluated from the given state.
inline std::vector<AgentDerivative> rhs(std::span<const AgentState> agents,
                                        std::span<const ObstacleSpec> obstacles,
                                        const SimParams& params, double eps_draw) {
    std::vector<AgentDerivative> out(agents.size());
    std::vector<InteractionSet> sets;
    if (params.avoidance_enabled) {
        sets = interaction_sets(agents, params.perception);
    }
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const AgentState& a = agents[i];
        out[i].dx = a.v;
        Vec3 dv = external_force(params.potential, params.damping, a.x, a.v, a.target);
        out[i].power = dot(a.v, dv);
        if (params.avoidance_enabled) {
            AvoidanceAccumulator acc;
            accumulate_pair_forces(i, agents, sets, params.avoidance, eps_draw, acc);
            for (const auto& o : obstacles) {
                accumulate_obstacle_force(a, o, params.avoidance, params.perception, eps_draw,
                                          acc);
            }
            dv += acc.resolve(params.avoidance.degeneracy_threshold);
        }
        out[i].dv = dv;
    }
    return out;
}

/// Signed fallback magnitude epsilon * U(-1, 1), drawn once per run.
inline double draw_epsilon(std::mt19937_64& rng, const AvoidanceParams& params) {
    std::uniform_real_distribution<double> unit(-1.0, 1.0);
    return params.epsilon * unit(rng);
}

/// Advances the world by one step of size params.dt.
///
/// The deterministic part is classical four-stage Runge-Kutta with interaction sets
/// re-evaluated at every stage. With speed_projection on, each velocity is then rescaled
/// so that |v|^2 changes by the Runge-Kutta quadrature of 2 <v, F_ext> over the stages.
/// With nu > 0 every velocity component finally receives an independent Gaussian kick of
/// standard deviation sqrt(2 nu dt).
inline void step(World& world, const SimParams& params, double eps_draw, std::mt19937_64& rng) {
    const std::size_t n = world.agents.size();
    const double dt = params.dt;

    auto obstacles_at = [&](double offset) {
        std::vector<ObstacleSpec> moved = world.obstacles;
        for (auto& o : moved) {
            o.center += offset * o.velocity;
        }
        return moved;
    };
    auto stage_state = [&](const std::vector<AgentDerivative>& k, double h) {
        AgentList s = world.agents;
        for (std::size_t i = 0; i < n; ++i) {
            s[i].x += h * k[i].dx;
            s[i].v += h * k[i].dv;
        }
        return s;
    };

    const auto obs_mid = obstacles_at(dt / 2);
    const auto obs_end = obstacles_at(dt);

    const auto k1 = rhs(world.agents, world.obstacles, params, eps_draw);
    const auto k2 = rhs(stage_state(k1, dt / 2), obs_mid, params, eps_draw);
    const auto k3 = rhs(stage_state(k2, dt / 2), obs_mid, params, eps_draw);
    const auto k4 = rhs(stage_state(k3, dt), obs_end, params, eps_draw);

    for (std::size_t i = 0; i < n; ++i) {
        auto& a = world.agents[i];
        const double speed2 = norm2(a.v);
        a.x += dt / 6 * (k1[i].dx + 2.0 * k2[i].dx + 2.0 * k3[i].dx + k4[i].dx);
        a.v += dt / 6 * (k1[i].dv + 2.0 * k2[i].dv + 2.0 * k3[i].dv + k4[i].dv);
        if (params.speed_projection) {
            const double target2 =
                speed2 + dt / 3 * (k1[i].power + 2.0 * k2[i].power + 2.0 * k3[i].power +
                                   k4[i].power);
            const double now2 = norm2(a.v);
            if (target2 > 0.0 && now2 > 0.0) {
                a.v *= std::sqrt(target2 / now2);
            }
        }
    }
    if (params.damping.nu > 0.0) {
        std::normal_distribution<double> normal(0.0, 1.0);
        const double amp = std::sqrt(2.0 * params.damping.nu * dt);
        for (auto& a : world.agents) {
            a.v.x += amp * normal(rng);
            a.v.y += amp * normal(rng);
            a.v.z += amp * normal(rng);
        }
    }
    world.obstacles = obs_end;
    world.t += dt;

    for (const auto& a : world.agents) {
        if (!is_finite(a.x) || !is_finite(a.v)) {
            std::ostringstream msg;
            msg << "non-finite state for agent " << a.id << " at t=" << world.t;
            throw SimulationAborted(msg.str());
        }
    }
}

struct EnergyParts {
    double kinetic = 0.0;
    double potential = 0.0;
    double total = 0.0;
};

/// E = sum_i |v_i|^2 / 2 + V(x_i)
inline EnergyParts energy(std::span<const AgentState> agents, PotentialKind kind) {
    EnergyParts e;
    for (const auto& a : agents) {
        e.kinetic += 0.5 * norm2(a.v);
        e.potential += potential(kind, a.x, a.target);
    }
    e.total = e.kinetic + e.potential;
    return e;
}

inline double min_pair_distance(std::span<const AgentState> agents) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < agents.size(); ++i) {
        for (std::size_t j = i + 1; j < agents.size(); ++j) {
            best = std::min(best, norm(agents[j].x - agents[i].x));
        }
    }
    return best;
}

/// Largest A^2 over gated, non-degenerate ordered pairs (0 when there are none).
inline double max_a_squared(std::span<const AgentState> agents, const SimParams& params) {
    double best = 0.0;
    const auto sets = interaction_sets(agents, params.perception);
    for (std::size_t i = 0; i < agents.size(); ++i) {
        for (std::size_t j : sets[i].members) {
            const RelativePose pose =
                relative_pose(agents[i].x, agents[i].v, agents[j].x, params.avoidance.geometry);
            if (pose.degenerate) {
                continue;
            }
            best = std::max(best, angle_rates(pose, agents[i].v, agents[j].v, 0.0).a_squared);
        }
    }
    return best;
}

struct DiagnosticsRecord {
    double t = 0.0;
    double energy = 0.0;
    double kinetic = 0.0;
    double potential = 0.0;
    double min_pair_dist = 0.0;  ///< +inf for a single agent
    double max_a_squared = 0.0;
    /// Running integral of sigma * sum |v|^2, trapezoidal per step.
    double dissipated = 0.0;
};

struct PenetrationEvent {
    double t = 0.0;
    std::size_t agent = 0;
    std::size_t obstacle = 0;
};

struct TrajectoryLog {
    std::vector<double> times;
    std::vector<AgentList> states;
    std::vector<std::vector<ObstacleSpec>> obstacles;
    std::vector<DiagnosticsRecord> diagnostics;
    /// Every integration step at which an agent was inside an obstacle.
    std::vector<PenetrationEvent> penetrations;
    /// Minimum pairwise distance over every integration step, not just samples.
    double min_pair_dist = std::numeric_limits<double>::infinity();
    double eps_draw = 0.0;
    std::size_t steps = 0;
};

inline std::size_t step_count(const SimParams& params) {
    if (!(params.dt > 0.0)) {
        throw ConfigError("dt must be positive");
    }
    if (!(params.t_end >= 0.0)) {
        throw ConfigError("t_end must be non-negative");
    }
    return static_cast<std::size_t>(std::llround(std::ceil(params.t_end / params.dt - 1e-9)));
}

/// Integrates from world.t to params.t_end, sampling every output_interval.
inline TrajectoryLog run(World world, const SimParams& params) {
    const std::size_t n_steps = step_count(params);
    const std::size_t every = std::max<std::size_t>(
        1, static_cast<std::size_t>(std::llround(params.output_interval / params.dt)));
    const double t0 = world.t;

    std::mt19937_64 rng(params.seed);
    TrajectoryLog log;
    log.eps_draw = draw_epsilon(rng, params.avoidance);

    double dissipated = 0.0;
    auto speed_sum = [&](const AgentList& agents) {
        double s = 0.0;
        for (const auto& a : agents) {
            s += norm2(a.v);
        }
        return params.damping.sigma * s;
    };
    auto check_penetration = [&]() {
        for (std::size_t i = 0; i < world.agents.size(); ++i) {
            for (std::size_t k = 0; k < world.obstacles.size(); ++k) {
                if (is_inside(world.agents[i].x, world.obstacles[k])) {
                    log.penetrations.push_back({world.t, i, k});
                }
            }
        }
    };
    auto sample = [&]() {
        const EnergyParts e = energy(world.agents, params.potential);
        DiagnosticsRecord d;
        d.t = world.t;
        d.energy = e.total;
        d.kinetic = e.kinetic;
        d.potential = e.potential;
        d.min_pair_dist = min_pair_distance(world.agents);
        d.max_a_squared = max_a_squared(world.agents, params);
        d.dissipated = dissipated;
        log.times.push_back(world.t);
        log.states.push_back(world.agents);
        log.obstacles.push_back(world.obstacles);
        log.diagnostics.push_back(d);
    };

    check_penetration();
    log.min_pair_dist = min_pair_distance(world.agents);
    sample();
    double power = speed_sum(world.agents);
    for (std::size_t s = 1; s <= n_steps; ++s) {
        step(world, params, log.eps_draw, rng);
        world.t = t0 + static_cast<double>(s) * params.dt;
        const double next_power = speed_sum(world.agents);
        dissipated += 0.5 * params.dt * (power + next_power);
        power = next_power;
        check_penetration();
        log.min_pair_dist = std::min(log.min_pair_dist, min_pair_distance(world.agents));
        if (s % every == 0 || s == n_steps) {
            sample();
        }
    }
    log.steps = n_steps;
    return log;
}

}  // namespace swarm3d
