#pragma once

#include <vector>

#include "swarm3d/vec3.hpp"

namespace swarm3d {

struct AgentState {
    int id = 0;
    Vec3 x;
    Vec3 v;
    Vec3 target;
};

/// Spherical obstacle moving with constant velocity.
struct ObstacleSpec {
    Vec3 center;
    double radius = 1.0;
    Vec3 velocity;
};

using AgentList = std::vector<AgentState>;

}  // namespace swarm3d
