// Velocity-aligned local frames and the relative-angle frame of an ordered pair.
//
// The local frame of an agent is the spherical unit triple of its velocity in the
// global basis: with azimuth theta and polar angle phi of v,
//
//   e_rho   = ( sin(phi)cos(theta),  sin(phi)sin(theta),  cos(phi) )
//   e_phi   = ( cos(phi)cos(theta),  cos(phi)sin(theta), -sin(phi) )
//   e_theta = (-sin(theta),          cos(theta),          0        )
//
// The partner direction k is then written k = sin(b)cos(a) e_rho + sin(b)sin(a) e_phi
// + cos(b) e_theta, where b is the relative polar angle and a the relative bearing.
#pragma once

#include <cmath>

#include "swarm3d/error.hpp"
#include "swarm3d/vec3.hpp"

namespace swarm3d {

struct GeometryTolerances {
    /// Horizontal speed fraction below which the velocity counts as vertical (azimuth := 0).
    double vertical_gauge = 1e-12;
    /// sin(beta) below this marks the partner as lying on the e_theta axis.
    double degenerate_sin_beta = 1e-9;
};

struct LocalFrame {
    Vec3 e_rho;
    Vec3 e_phi;
    Vec3 e_theta;
};

struct RelativePose {
    double d = 0.0;
    Vec3 k;
    double cos_beta = 1.0;
    double sin_beta = 0.0;
    double cos_alpha = 0.0;
    double sin_alpha = 1.0;
    Vec3 e_beta;
    Vec3 e_alpha;
    LocalFrame frame;
    bool degenerate = false;
};

struct AngleRates {
    double beta_dot = 0.0;
    double sinbeta_alpha_dot = 0.0;
    double a_squared = 0.0;
    double gamma = 0.0;
};

inline LocalFrame local_frame_of(const Vec3& v, const GeometryTolerances& tol = {}) {
    const double speed = norm(v);
    if (!(speed > 0.0)) {
        throw GeometryError("no direction: local frame of a zero velocity");
    }
    const double horizontal = std::hypot(v.x, v.y);
    double cos_theta = 1.0;
    double sin_theta = 0.0;
    if (horizontal >= tol.vertical_gauge * speed) {
        cos_theta = v.x / horizontal;
        sin_theta = v.y / horizontal;
    }
    const double cos_phi = v.z / speed;
    const double sin_phi = horizontal / speed;

    LocalFrame f;
    f.e_rho = {sin_phi * cos_theta, sin_phi * sin_theta, cos_phi};
    f.e_phi = {cos_phi * cos_theta, cos_phi * sin_theta, -sin_phi};
    f.e_theta = {-sin_theta, cos_theta, 0.0};
    return f;
}

/// Pose of x_j seen from an agent at x_i moving with v_i.
///
/// When sin(beta) falls below the tolerance the pose is flagged degenerate and the
/// bearing is pinned to cos(alpha) = 0, sin(alpha) = 1.
inline RelativePose relative_pose(const Vec3& x_i, const Vec3& v_i, const Vec3& x_j,
                                  const GeometryTolerances& tol = {}) {
    const Vec3 z = x_j - x_i;
    const double d = norm(z);
    if (!(d > 0.0)) {
        throw GeometryError("relative pose of coincident positions");
    }
    RelativePose p;
    p.frame = local_frame_of(v_i, tol);
    p.d = d;
    p.k = z / d;

    const double k_rho = dot(p.k, p.frame.e_rho);
    const double k_phi = dot(p.k, p.frame.e_phi);
    p.cos_beta = dot(p.k, p.frame.e_theta);
    p.sin_beta = std::hypot(k_rho, k_phi);
    if (p.sin_beta < tol.degenerate_sin_beta) {
        p.degenerate = true;
        p.cos_alpha = 0.0;
        p.sin_alpha = 1.0;
    } else {
        p.cos_alpha = k_rho / p.sin_beta;
        p.sin_alpha = k_phi / p.sin_beta;
    }
    const auto& f = p.frame;
    p.e_beta = p.cos_beta * p.cos_alpha * f.e_rho + p.cos_beta * p.sin_alpha * f.e_phi -
               p.sin_beta * f.e_theta;
    p.e_alpha = -p.sin_alpha * f.e_rho + p.cos_alpha * f.e_phi;
    return p;
}

/// Rates of the relative angles under ballistic motion, the squared indicator
/// A^2 = beta_dot^2 + (sin(beta) alpha_dot)^2 and the growth rate
/// gamma = (2 + omega) (|u|/d)^2 tau of the cooperative turning law.
inline AngleRates angle_rates(const RelativePose& pose, const Vec3& v_i, const Vec3& v_j,
                              double omega) {
    if (pose.degenerate) {
        throw GeometryError("angle rates of a degenerate pose");
    }
    const Vec3 u = v_j - v_i;
    AngleRates r;
    r.beta_dot = dot(u, pose.e_beta) / pose.d;
    r.sinbeta_alpha_dot = dot(u, pose.e_alpha) / pose.d;
    r.a_squared = r.beta_dot * r.beta_dot + r.sinbeta_alpha_dot * r.sinbeta_alpha_dot;
    const double u2 = norm2(u);
    if (u2 > 0.0) {
        const double tau = -dot(pose.d * pose.k, u) / u2;
        r.gamma = (2.0 + omega) * (u2 / (pose.d * pose.d)) * tau;
    }
    return r;
}

}  // namespace swarm3d
