#pragma once

#include <Eigen/Dense>

#include "tbdphd/rng.hpp"
#include "tbdphd/types.hpp"

namespace tbdphd {

// Nearly-constant-velocity kinematics, independent per axis:
//   F = I2 (x) [[1, tau], [0, 1]]
//   Q = q * I2 (x) [[tau^4/4, tau^3/2], [tau^3/2, tau^2]]
// Each 2x2 noise block is rank one, q * v v^T with v = [tau^2/2, tau]^T, so
// sampling draws one standard normal per axis and scales by sqrt(q) * v.
class MotionModel {
public:
    MotionModel(double tau, double q);

    double tau() const { return tau_; }
    double q() const { return q_; }

    const Eigen::Matrix4d& transition() const { return F_; }
    const Eigen::Matrix4d& process_noise() const { return Q_; }

    StateVector propagate_mean(const StateVector& s) const;

    // One random transition: F s + w, w ~ N(0, Q). Consumes two normals, x
    // axis first.
    StateVector propagate(const StateVector& s, RngStream& rng) const;

private:
    double tau_, q_;
    Eigen::Matrix4d F_, Q_;
};

// Advances a ground-truth state by one scan interval.
inline StateVector propagate_truth(const StateVector& s, const MotionModel& model,
                                   RngStream& rng) {
    return model.propagate(s, rng);
}

}  // namespace tbdphd
