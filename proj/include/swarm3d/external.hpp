// Target attraction, friction and the noise intensity.
#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <string_view>

#include "swarm3d/vec3.hpp"

namespace swarm3d {

enum class PotentialKind {
    none,      ///< V = 0, free flight
    smooth,    ///< V = (1 + |x - x_T|^2)^(1/2) / 4
    distance,  ///< V = |x - x_T|
};

inline std::string_view to_string(PotentialKind k) {
    switch (k) {
        case PotentialKind::none: return "none";
        case PotentialKind::smooth: return "smooth";
        case PotentialKind::distance: return "distance";
    }
    return "?";
}

inline std::optional<PotentialKind> parse_potential_kind(std::string_view s) {
    if (s == "none") return PotentialKind::none;
    if (s == "smooth") return PotentialKind::smooth;
    if (s == "distance") return PotentialKind::distance;
    return std::nullopt;
}

struct DampingNoise {
    double sigma = 0.25;  ///< friction coefficient
    double nu = 0.0;      ///< velocity diffusion; the kick has standard deviation sqrt(2 nu dt)
};

inline double potential(PotentialKind kind, const Vec3& x, const Vec3& target) {
    const double r2 = norm2(x - target);
    switch (kind) {
        case PotentialKind::none: return 0.0;
        case PotentialKind::smooth: return 0.25 * std::sqrt(1.0 + r2);
        case PotentialKind::distance: return std::sqrt(r2);
    }
    return 0.0;
}

struct Gradient {
    Vec3 value;
    bool degenerate = false;  ///< distance potential evaluated at its kink
};

inline Gradient potential_gradient(PotentialKind kind, const Vec3& x, const Vec3& target) {
    const Vec3 r = x - target;
    switch (kind) {
        case PotentialKind::none: return {};
        case PotentialKind::smooth: return {r / (4.0 * std::sqrt(1.0 + norm2(r))), false};
        case PotentialKind::distance: {
            const double n = norm(r);
            if (n == 0.0) {
                return {{}, true};
            }
            return {r / n, false};
        }
    }
    return {};
}

/// -grad V(x) - sigma v
inline Vec3 external_force(PotentialKind kind, const DampingNoise& damping, const Vec3& x,
                           const Vec3& v, const Vec3& target) {
    return -potential_gradient(kind, x, target).value - damping.sigma * v;
}

}  // namespace swarm3d
