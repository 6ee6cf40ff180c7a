// Built-in experiment configurations.
#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>
#include <optional>
#include <random>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "swarm3d/agent.hpp"
#include "swarm3d/dynamics.hpp"
#include "swarm3d/error.hpp"
#include "swarm3d/vec3.hpp"

namespace swarm3d {

struct ScenarioSpec {
    std::string name;
    AgentList agents;
    std::vector<ObstacleSpec> obstacles;
    SimParams params;

    World world() const { return World{0.0, agents, obstacles}; }
};

struct ScenarioOptions {
    std::optional<int> n;
    /// Initial speed factor: v(0) = -alpha x(0) for the circle scenario.
    std::optional<double> alpha;
    /// Seed for randomized initial data (obstacles scenario) and for the run.
    std::uint64_t seed = 0;
};

inline const std::vector<std::string_view>& scenario_names() {
    static const std::vector<std::string_view> names{"circle", "overtake", "ball3d",
                                                     "obstacles"};
    return names;
}

/// Default model parameters shared by every built-in scenario.
inline SimParams default_params(double t_end, std::uint64_t seed) {
    SimParams p;
    p.perception.safety_radius = 1.0;
    p.perception.kappa = -0.5;  // cos(2 pi / 3)
    p.damping.sigma = 0.25;
    p.damping.nu = 0.0;
    p.potential = PotentialKind::smooth;
    p.t_end = t_end;
    p.seed = seed;
    return p;
}

/// Throws ConfigError when ids repeat, an agent starts inside an obstacle, or any value
/// is non-finite.
inline void validate(const ScenarioSpec& spec) {
    std::set<int> ids;
    for (const auto& a : spec.agents) {
        if (!ids.insert(a.id).second) {
            throw ConfigError("duplicate agent id " + std::to_string(a.id));
        }
        if (!is_finite(a.x) || !is_finite(a.v) || !is_finite(a.target)) {
            throw ConfigError("non-finite state for agent " + std::to_string(a.id));
        }
        for (const auto& o : spec.obstacles) {
            if (is_inside(a.x, o)) {
                throw ConfigError("agent " + std::to_string(a.id) + " starts inside an obstacle");
            }
        }
    }
    for (const auto& o : spec.obstacles) {
        if (!(o.radius > 0.0) || !is_finite(o.center) || !is_finite(o.velocity)) {
            throw ConfigError("obstacle needs a finite center and velocity and radius > 0");
        }
    }
    const auto& p = spec.params;
    if (!(p.dt > 0.0) || !(p.t_end >= 0.0) || !(p.output_interval > 0.0)) {
        throw ConfigError("need dt > 0, t_end >= 0 and output_interval > 0");
    }
    if (!(p.perception.safety_radius > 0.0) || !(p.perception.kappa >= -1.0) ||
        !(p.perception.kappa <= 1.0)) {
        throw ConfigError("need R > 0 and -1 <= kappa <= 1");
    }
    if (!(p.damping.sigma >= 0.0) || !(p.damping.nu >= 0.0)) {
        throw ConfigError("sigma and nu must be non-negative");
    }
}

/// N agents equally spaced on the unit circle in the z = 0 plane, heading through the
/// centre with v(0) = -alpha x(0); each targets its antipode.
inline ScenarioSpec circle_scenario(int n, double alpha, std::uint64_t seed = 0) {
    if (n < 1) {
        throw ConfigError("circle needs at least one agent");
    }
    ScenarioSpec s;
    s.name = "circle";
    s.params = default_params(40.0, seed);
    for (int i = 0; i < n; ++i) {
        const double angle = 2.0 * std::numbers::pi * i / n;
        const Vec3 x{std::cos(angle), std::sin(angle), 0.0};
        s.agents.push_back({i, x, -alpha * x, -x});
    }
    return s;
}

/// Agents almost aligned on the Ox axis, the rear one faster. n is 2 or 3.
inline ScenarioSpec overtake_scenario(int n, std::uint64_t seed = 0) {
    if (n != 2 && n != 3) {
        throw ConfigError("overtake supports 2 or 3 agents");
    }
    constexpr double offset = 1e-6;
    const Vec3 target{100.0, 0.0, 0.0};
    ScenarioSpec s;
    s.name = "overtake";
    s.params = default_params(40.0, seed);
    s.agents.push_back({0, {-4.0, offset, 0.0}, {1.0, 0.0, 0.0}, target});
    s.agents.push_back({1, {-2.0, 0.0, 0.0}, {0.5, 0.0, 0.0}, target});
    if (n == 3) {
        s.agents.push_back({2, {-6.0, 2.0 * offset, 0.0}, {2.0, 0.0, 0.0}, target});
    }
    return s;
}

/// n points spread over the unit sphere (spherical Fibonacci lattice).
inline std::vector<Vec3> sphere_points(int n) {
    std::vector<Vec3> pts;
    const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
    for (int i = 0; i < n; ++i) {
        const double z = 1.0 - (2.0 * i + 1.0) / n;
        const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
        const double phi = golden * i;
        pts.push_back({r * std::cos(phi), r * std::sin(phi), z});
    }
    return pts;
}

/// N agents on the unit sphere heading through its centre towards their antipodes.
inline ScenarioSpec ball3d_scenario(int n, std::uint64_t seed = 0) {
    if (n < 1) {
        throw ConfigError("ball3d needs at least one agent");
    }
    ScenarioSpec s;
    s.name = "ball3d";
    s.params = default_params(40.0, seed);
    const auto pts = sphere_points(n);
    for (int i = 0; i < n; ++i) {
        s.agents.push_back({i, pts[i], -0.5 * pts[i], -pts[i]});
    }
    return s;
}

/// Two static balls on the diagonal between a swarm and its shared target (7, 7, 0).
/// Agents start on the unit sphere around (-1, -1, 0) with seeded random unit velocities.
inline ScenarioSpec obstacles_scenario(int n, std::uint64_t seed = 0) {
    if (n < 1) {
        throw ConfigError("obstacles needs at least one agent");
    }
    ScenarioSpec s;
    s.name = "obstacles";
    s.params = default_params(20.0, seed);
    s.obstacles.push_back({{2.0, 2.0, 0.0}, 0.5, {}});
    s.obstacles.push_back({{5.0, 5.0, 0.0}, 1.0, {}});
    const Vec3 center{-1.0, -1.0, 0.0};
    const Vec3 target{7.0, 7.0, 0.0};
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    const auto pts = sphere_points(n);
    for (int i = 0; i < n; ++i) {
        Vec3 dir;
        do {
            dir = {normal(rng), normal(rng), normal(rng)};
        } while (norm(dir) < 1e-8);
        s.agents.push_back({i, center + pts[i], dir / norm(dir), target});
    }
    return s;
}

/// Builds one of the named scenarios; throws ConfigError("unknown scenario ...") otherwise.
inline ScenarioSpec build_scenario(std::string_view name, const ScenarioOptions& opt = {}) {
    ScenarioSpec s;
    if (name == "circle") {
        s = circle_scenario(opt.n.value_or(3), opt.alpha.value_or(0.5), opt.seed);
    } else if (name == "overtake") {
        s = overtake_scenario(opt.n.value_or(2), opt.seed);
    } else if (name == "ball3d") {
        s = ball3d_scenario(opt.n.value_or(3), opt.seed);
    } else if (name == "obstacles") {
        s = obstacles_scenario(opt.n.value_or(8), opt.seed);
    } else {
        throw ConfigError("unknown scenario '" + std::string(name) + "'");
    }
    validate(s);
    return s;
}

}  // namespace swarm3d
