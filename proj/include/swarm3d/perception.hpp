// Encounter quantities under ballistic extrapolation, the vision cone, and the
// per-agent set of threatening partners.
#pragma once

#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "swarm3d/agent.hpp"
#include "swarm3d/vec3.hpp"

namespace swarm3d {

struct PerceptionParams {
    /// Safety radius: pairs whose minimal distance exceeds it are ignored.
    double safety_radius = 1.0;
    /// Cosine of the vision-cone half angle; -0.5 is a 120 degree half angle.
    double kappa = -0.5;
    /// Relative speed below which a pair keeps a constant distance and is skipped.
    double min_relative_speed = 1e-12;
};

struct Encounter {
    double tau = 0.0;    ///< time to closest approach, positive in the future
    double d_min = 0.0;  ///< separation at closest approach
    double d_bar = 0.0;  ///< signed path length of the subject to its closest-approach point
};

/// Closest approach of j relative to i assuming both keep their velocities.
/// Returns nullopt when the relative velocity vanishes.
inline std::optional<Encounter> encounter(const Vec3& x_i, const Vec3& v_i, const Vec3& x_j,
                                          const Vec3& v_j, double min_relative_speed = 1e-12) {
    const Vec3 z = x_j - x_i;
    const Vec3 u = v_j - v_i;
    const double speed = norm(u);
    if (speed < min_relative_speed) {
        return std::nullopt;
    }
    const double zu = dot(z, u);
    Encounter e;
    e.tau = -zu / (speed * speed);
    e.d_bar = e.tau * norm(v_i);
    // |z|^2 - (<z,u>/|u|)^2 equals |z x u|^2 / |u|^2; the cross form has no cancellation.
    e.d_min = norm(cross(z, u)) / speed;
    return e;
}

/// Inclusive cone test <z, v> >= kappa |z| |v|. A zero velocity has no cone.
inline bool in_vision_cone(const Vec3& v, const Vec3& z, double kappa) {
    const double speed = norm(v);
    if (!(speed > 0.0)) {
        return false;
    }
    return dot(z, v) >= kappa * norm(z) * speed;
}

/// True when j threatens i: future encounter (tau > 0) inside the safety radius and
/// x_j within the vision cone of i.
inline bool is_threat(const AgentState& a, const AgentState& b, const PerceptionParams& p) {
    if (!(norm2(a.v) > 0.0)) {
        return false;
    }
    const auto enc = encounter(a.x, a.v, b.x, b.v, p.min_relative_speed);
    if (!enc || !(enc->tau > 0.0) || !(enc->d_min <= p.safety_radius)) {
        return false;
    }
    return in_vision_cone(a.v, b.x - a.x, p.kappa);
}

struct InteractionSet {
    std::size_t owner = 0;
    std::vector<std::size_t> members;  ///< ascending agent indices

    bool contains(std::size_t j) const {
        for (auto m : members) {
            if (m == j) {
                return true;
            }
        }
        return false;
    }
};

inline InteractionSet interaction_set(std::size_t i, std::span<const AgentState> states,
                                      const PerceptionParams& params) {
    InteractionSet set;
    set.owner = i;
    for (std::size_t j = 0; j < states.size(); ++j) {
        if (j != i && is_threat(states[i], states[j], params)) {
            set.members.push_back(j);
        }
    }
    return set;
}

inline std::vector<InteractionSet> interaction_sets(std::span<const AgentState> states,
                                                    const PerceptionParams& params) {
    std::vector<InteractionSet> sets;
    sets.reserve(states.size());
    for (std::size_t i = 0; i < states.size(); ++i) {
        sets.push_back(interaction_set(i, states, params));
    }
    return sets;
}

}  // namespace swarm3d
