#pragma once

#include <Eigen/Dense>

namespace tbdphd {

// Planar constant-velocity target state, ordered [px, vx, py, vy].
// Positions in metres, velocities in metres per second.
struct StateVector {
    double px = 0.0;
    double vx = 0.0;
    double py = 0.0;
    double vy = 0.0;

    Eigen::Vector4d to_vector() const { return {px, vx, py, vy}; }

    static StateVector from_vector(const Eigen::Vector4d& v) {
        return {v[0], v[1], v[2], v[3]};
    }

    Eigen::Vector2d position() const { return {px, py}; }
};

}  // namespace tbdphd
