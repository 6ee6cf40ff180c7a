// Interaction field of an empirical ensemble. Crossed with the velocity it reproduces
// the pairwise self-avoidance force, which makes it an independent check of that sum.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "swarm3d/agent.hpp"
#include "swarm3d/avoidance.hpp"
#include "swarm3d/geometry.hpp"
#include "swarm3d/perception.hpp"
#include "swarm3d/vec3.hpp"

namespace swarm3d::meanfield {

struct Particle {
    Vec3 x;
    Vec3 v;
};

/// Equal-weight point masses.
struct EmpiricalEnsemble {
    std::vector<Particle> particles;

    static EmpiricalEnsemble from_agents(std::span<const AgentState> agents) {
        EmpiricalEnsemble e;
        e.particles.reserve(agents.size());
        for (const auto& a : agents) {
            e.particles.push_back({a.x, a.v});
        }
        return e;
    }
};

/// R(z, u) = u x z / |z|^2
inline Vec3 axis_field(const Vec3& z, const Vec3& u) { return cross(u, z) / norm2(z); }

/// Membership of displacement z in K(v, w): future encounter within the safety radius
/// for relative velocity w - v, and z inside the cone of v. z = 0 is never a member.
inline bool in_kernel_support(const Vec3& z, const Vec3& v, const Vec3& w,
                              const PerceptionParams& perception) {
    if (!(norm2(z) > 0.0) || !(norm2(v) > 0.0)) {
        return false;
    }
    const auto enc = encounter({}, v, z, w, perception.min_relative_speed);
    if (!enc || !(enc->tau > 0.0) || !(enc->d_min <= perception.safety_radius)) {
        return false;
    }
    return in_vision_cone(v, z, perception.kappa);
}

/// Cooperation weight: 1 when the partner (velocity w, sitting at z) sees the subject
/// in its own cone, otherwise the cosine of the subject's bearing to z.
inline double cooperation_weight(const Vec3& z, const Vec3& v, const Vec3& w,
                                 const PerceptionParams& perception,
                                 const GeometryTolerances& tol) {
    if (in_vision_cone(w, -z, perception.kappa)) {
        return 1.0;
    }
    return relative_pose({}, v, z, tol).cos_alpha;
}

/// m(z, v, w) = gain / |R(z, w - v)| * H * exp(-tau(z, w - v)) on the support of K(v, w).
/// nullopt outside the support or when the axis is degenerate.
inline std::optional<double> mobility_kernel(const Vec3& z, const Vec3& v, const Vec3& w,
                                             const AvoidanceParams& params,
                                             const PerceptionParams& perception) {
    if (!in_kernel_support(z, v, w, perception)) {
        return std::nullopt;
    }
    const Vec3 u = w - v;
    const double axis_norm = norm(axis_field(z, u));
    if (axis_norm < params.degeneracy_threshold) {
        return std::nullopt;
    }
    const double tau = -dot(z, u) / norm2(u);
    const double h = cooperation_weight(z, v, w, perception, params.geometry);
    return params.pair_gain / axis_norm * h * std::exp(-tau);
}

/// Omega(x, v) = -(1/N) sum_j m(z_j, v, v_j) 1_K(z_j) R(z_j, v_j - v), z_j = x_j - x.
/// The 1/N prefactor follows params.mean_field_scaling.
inline Vec3 omega_empirical(const Vec3& x, const Vec3& v, const EmpiricalEnsemble& ensemble,
                            const AvoidanceParams& params, const PerceptionParams& perception) {
    Vec3 sum;
    for (const auto& p : ensemble.particles) {
        const Vec3 z = p.x - x;
        if (const auto m = mobility_kernel(z, v, p.v, params, perception)) {
            sum += *m * axis_field(z, p.v - v);
        }
    }
    const double scale = params.mean_field_scaling && !ensemble.particles.empty()
                             ? 1.0 / static_cast<double>(ensemble.particles.size())
                             : 1.0;
    return -scale * sum;
}

/// Largest relative deviation, over all agents, between the pairwise force (fallback
/// disabled) and v x Omega evaluated on the same agents.
inline double force_equivalence_report(std::span<const AgentState> agents,
                                       const AvoidanceParams& params,
                                       const PerceptionParams& perception) {
    const auto sets = interaction_sets(agents, perception);
    const auto ensemble = EmpiricalEnsemble::from_agents(agents);
    double worst = 0.0;
    for (std::size_t i = 0; i < agents.size(); ++i) {
        const Vec3 direct = self_force(i, agents, sets, params, 0.0, false);
        const Vec3 field =
            cross(agents[i].v, omega_empirical(agents[i].x, agents[i].v, ensemble, params,
                                               perception));
        const double scale = std::max(norm(direct), norm(field));
        if (scale > 0.0) {
            worst = std::max(worst, norm(direct - field) / scale);
        }
    }
    return worst;
}

}  // namespace swarm3d::meanfield
