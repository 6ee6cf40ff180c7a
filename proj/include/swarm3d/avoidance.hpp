// Gyroscopic avoidance: pair rotation axes and frequencies, the self-avoidance force
// with its symmetry-breaking fallback, and the force exerted by spherical obstacles.
#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <numbers>
#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "swarm3d/agent.hpp"
#include "swarm3d/error.hpp"
#include "swarm3d/geometry.hpp"
#include "swarm3d/perception.hpp"
#include "swarm3d/vec3.hpp"

namespace swarm3d {

struct AvoidanceParams {
    double pair_gain = 8.0 * std::numbers::pi;
    double obstacle_gain = 16.0 * std::numbers::pi;
    /// Magnitude of the symmetry-breaking fallback force.
    double epsilon = 1e-6;
    /// Axes, and accumulated forces, shorter than this count as vanishing.
    double degeneracy_threshold = 1e-9;
    /// Divide pair contributions by the agent count.
    bool mean_field_scaling = true;
    GeometryTolerances geometry;
};

struct PairInteraction {
    Vec3 axis;
    double freq = 0.0;
    double weight = 0.0;
    bool cooperative = false;
};

/// Rotation axis R = -(v_j - v_i) x k / d of an ordered pair.
inline Vec3 rotation_axis(const Vec3& v_i, const Vec3& v_j, const RelativePose& pose) {
    return -cross(v_j - v_i, pose.k) / pose.d;
}

/// Axis, frequency and cooperation weight of a gated pair. The frequency is
/// gain * exp(-tau) / |R| so that |freq * R| = gain * exp(-tau). Returns nullopt when
/// |R| is below the degeneracy threshold.
inline std::optional<PairInteraction> pair_interaction(const AgentState& i, const AgentState& j,
                                                       const Encounter& enc,
                                                       const RelativePose& pose_ij,
                                                       bool mutual_visible,
                                                       const AvoidanceParams& params) {
    PairInteraction p;
    p.axis = rotation_axis(i.v, j.v, pose_ij);
    const double axis_norm = norm(p.axis);
    if (axis_norm < params.degeneracy_threshold) {
        return std::nullopt;
    }
    p.freq = params.pair_gain * std::exp(-enc.tau) / axis_norm;
    p.cooperative = mutual_visible;
    p.weight = mutual_visible ? 1.0 : pose_ij.cos_alpha;
    return p;
}

/// Running sum of avoidance contributions acting on one agent.
///
/// Degenerate terms (vanishing axis) only feed the fallback sum. The fallback replaces
/// the direct sum when the latter vanishes while at least one partner is engaged.
struct AvoidanceAccumulator {
    Vec3 direct;
    Vec3 fallback;
    bool engaged = false;

    void add_direct(const Vec3& f) {
        direct += f;
        engaged = true;
    }
    void add_fallback(const Vec3& f) {
        fallback += f;
        engaged = true;
    }

    Vec3 resolve(double threshold, bool allow_fallback = true) const {
        if (allow_fallback && engaged && norm(direct) < threshold) {
            return fallback;
        }
        return direct;
    }
};

/// Adds every partner in K_i to `acc`. `eps_draw` is the signed run-level fallback
/// magnitude. Agents with zero speed receive nothing.
inline void accumulate_pair_forces(std::size_t i, std::span<const AgentState> states,
                                   std::span<const InteractionSet> sets,
                                   const AvoidanceParams& params, double eps_draw,
                                   AvoidanceAccumulator& acc) {
    const AgentState& self = states[i];
    if (!(norm2(self.v) > 0.0) || sets[i].members.empty()) {
        return;
    }
    const double scale =
        params.mean_field_scaling ? 1.0 / static_cast<double>(states.size()) : 1.0;
    const Vec3 fallback_dir = cross(self.v, kUnitZ);
    for (std::size_t j : sets[i].members) {
        const AgentState& other = states[j];
        const auto enc = encounter(self.x, self.v, other.x, other.v);
        if (!enc) {
            continue;
        }
        const RelativePose pose = relative_pose(self.x, self.v, other.x, params.geometry);
        const bool mutual = sets[j].contains(i);
        if (const auto pi = pair_interaction(self, other, *enc, pose, mutual, params)) {
            acc.add_direct(scale * pi->freq * pi->weight * cross(self.v, pi->axis));
        } else {
            const double weight = mutual ? 1.0 : pose.cos_alpha;
            acc.add_fallback(scale * eps_draw * std::exp(-enc->tau) * weight * fallback_dir);
        }
    }
}

/// Self-avoidance force on agent i from its interaction set.
inline Vec3 self_force(std::size_t i, std::span<const AgentState> states,
                       std::span<const InteractionSet> sets, const AvoidanceParams& params,
                       double eps_draw, bool allow_fallback = true) {
    AvoidanceAccumulator acc;
    accumulate_pair_forces(i, states, sets, params, eps_draw, acc);
    return acc.resolve(params.degeneracy_threshold, allow_fallback);
}

/// Closest point of the sphere surface to x inside the vision cone of velocity v.
///
/// Surface points at distance s from x fill a circle of directions at angle psi(s)
/// around the centre direction, and psi grows with s on the near hemisphere. The first
/// such circle to touch the cone is rotated towards v by the excess of the centre's
/// off-axis angle over the cone half angle.
inline std::optional<Vec3> closest_visible_point(const Vec3& x, const Vec3& v,
                                                 const ObstacleSpec& obstacle, double kappa) {
    const double speed = norm(v);
    const Vec3 to_center = obstacle.center - x;
    const double dist = norm(to_center);
    if (!(speed > 0.0) || !(dist > obstacle.radius)) {
        return std::nullopt;
    }
    const Vec3 c_hat = to_center / dist;
    const Vec3 v_hat = v / speed;
    const double cone_half = std::acos(std::clamp(kappa, -1.0, 1.0));
    const double off_axis = std::acos(std::clamp(dot(v_hat, c_hat), -1.0, 1.0));
    if (off_axis <= cone_half) {
        return x + (dist - obstacle.radius) * c_hat;
    }
    const double psi = off_axis - cone_half;
    if (psi > std::asin(obstacle.radius / dist)) {
        return std::nullopt;
    }
    Vec3 toward_v = v_hat - dot(v_hat, c_hat) * c_hat;
    const double tn = norm(toward_v);
    if (tn < 1e-12) {
        toward_v = local_frame_of(c_hat).e_phi;
    } else {
        toward_v = toward_v / tn;
    }
    const double sp = std::sin(psi);
    const double cp = std::cos(psi);
    const double disc = obstacle.radius * obstacle.radius - dist * dist * sp * sp;
    const double s = dist * cp - std::sqrt(std::max(0.0, disc));
    return x + s * (cp * c_hat + sp * toward_v);
}

inline bool is_inside(const Vec3& x, const ObstacleSpec& obstacle) {
    return norm(x - obstacle.center) < obstacle.radius;
}

/// Adds the obstacle contribution for `agent` to `acc`. Returns true when the agent is
/// inside the obstacle, in which case nothing is added.
inline bool accumulate_obstacle_force(const AgentState& agent, const ObstacleSpec& obstacle,
                                      const AvoidanceParams& params,
                                      const PerceptionParams& perception, double eps_draw,
                                      AvoidanceAccumulator& acc) {
    if (is_inside(agent.x, obstacle)) {
        return true;
    }
    const auto x_o = closest_visible_point(agent.x, agent.v, obstacle, perception.kappa);
    if (!x_o) {
        return false;
    }
    const auto enc =
        encounter(agent.x, agent.v, *x_o, obstacle.velocity, perception.min_relative_speed);
    if (!enc || !(enc->tau > 0.0) || !(enc->d_min <= perception.safety_radius)) {
        return false;
    }
    const RelativePose pose = relative_pose(agent.x, agent.v, *x_o, params.geometry);
    const Vec3 axis = rotation_axis(agent.v, obstacle.velocity, pose);
    const double axis_norm = norm(axis);
    const double weight = pose.cos_alpha;
    if (axis_norm < params.degeneracy_threshold) {
        acc.add_fallback(eps_draw * std::exp(-enc->tau) * weight * cross(agent.v, kUnitZ));
        return false;
    }
    const double freq = params.obstacle_gain * std::exp(-enc->tau) / axis_norm;
    acc.add_direct(freq * weight * cross(agent.v, axis));
    return false;
}

/// Force of a single obstacle on an agent. Zero when the agent is inside the obstacle.
inline Vec3 obstacle_force(const AgentState& agent, const ObstacleSpec& obstacle,
                           const AvoidanceParams& params, const PerceptionParams& perception,
                           double eps_draw) {
    AvoidanceAccumulator acc;
    accumulate_obstacle_force(agent, obstacle, params, perception, eps_draw, acc);
    return acc.resolve(params.degeneracy_threshold);
}

/// Finite-difference growth rate of A^2 for an isolated cooperative pair against the
/// lower bound (gamma / 2) A^2.
struct GrowthCheck {
    double lhs = 0.0;  ///< d(A^2)/dt by central differences
    double rhs = 0.0;  ///< (gamma / 2) A^2 at the initial instant
    double a_squared = 0.0;
    double gamma = 0.0;
};

namespace detail {

struct PairPhase {
    Vec3 xi, vi, xj, vj;
};

inline PairPhase pair_derivative(const PairPhase& s, double gain) {
    const Vec3 z = s.xj - s.xi;
    const Vec3 u = s.vj - s.vi;
    const double d = norm(z);
    const Vec3 axis = -cross(u, z / d) / d;
    const double axis_norm = norm(axis);
    Vec3 turn_i, turn_j;
    if (axis_norm > 0.0) {
        const double tau = -dot(z, u) / norm2(u);
        const double omega = gain * std::exp(-tau) / axis_norm;
        turn_i = omega * cross(s.vi, axis);
        turn_j = omega * cross(s.vj, axis);
    }
    return {s.vi, turn_i, s.vj, turn_j};
}

inline PairPhase pair_axpy(const PairPhase& s, double h, const PairPhase& k) {
    return {s.xi + h * k.xi, s.vi + h * k.vi, s.xj + h * k.xj, s.vj + h * k.vj};
}

inline PairPhase pair_rk4(const PairPhase& s, double h, double gain) {
    const auto k1 = pair_derivative(s, gain);
    const auto k2 = pair_derivative(pair_axpy(s, h / 2, k1), gain);
    const auto k3 = pair_derivative(pair_axpy(s, h / 2, k2), gain);
    const auto k4 = pair_derivative(pair_axpy(s, h, k3), gain);
    PairPhase out = s;
    out.xi += h / 6 * (k1.xi + 2.0 * k2.xi + 2.0 * k3.xi + k4.xi);
    out.vi += h / 6 * (k1.vi + 2.0 * k2.vi + 2.0 * k3.vi + k4.vi);
    out.xj += h / 6 * (k1.xj + 2.0 * k2.xj + 2.0 * k3.xj + k4.xj);
    out.vj += h / 6 * (k1.vj + 2.0 * k2.vj + 2.0 * k3.vj + k4.vj);
    return out;
}

inline double pair_a_squared(const PairPhase& s) {
    const Vec3 z = s.xj - s.xi;
    const double d2 = norm2(z);
    return norm2(cross(s.vj - s.vi, z)) / (d2 * d2);
}

}  // namespace detail

/// Returns nullopt when the pair is not mutually gated (the bound does not apply).
/// Throws GeometryError for a degenerate relative pose. A vanishing axis means the pair
/// does not turn; the growth rate then uses omega = 0.
inline std::optional<GrowthCheck> a_squared_growth_check(const AgentState& i, const AgentState& j,
                                                         const AvoidanceParams& params,
                                                         const PerceptionParams& perception,
                                                         double h) {
    if (!is_threat(i, j, perception) || !is_threat(j, i, perception)) {
        return std::nullopt;
    }
    const auto enc = encounter(i.x, i.v, j.x, j.v, perception.min_relative_speed);
    const RelativePose pose = relative_pose(i.x, i.v, j.x, params.geometry);
    if (pose.degenerate) {
        throw GeometryError("growth check on a degenerate pose");
    }
    const auto pi = pair_interaction(i, j, *enc, pose, true, params);
    const double omega = pi ? pi->freq : 0.0;
    const AngleRates rates = angle_rates(pose, i.v, j.v, omega);

    const detail::PairPhase s0{i.x, i.v, j.x, j.v};
    const double gain = pi ? params.pair_gain : 0.0;
    const double ahead = detail::pair_a_squared(detail::pair_rk4(s0, h, gain));
    const double behind = detail::pair_a_squared(detail::pair_rk4(s0, -h, gain));

    GrowthCheck out;
    out.a_squared = rates.a_squared;
    out.gamma = rates.gamma;
    out.lhs = (ahead - behind) / (2.0 * h);
    out.rhs = 0.5 * rates.gamma * rates.a_squared;
    return out;
}

}  // namespace swarm3d
