#include "tbdphd/motion.hpp"

#include <cmath>
#include <stdexcept>

namespace tbdphd {

MotionModel::MotionModel(double tau, double q) : tau_(tau), q_(q) {
    if (!(tau > 0.0) || !std::isfinite(tau)) {
        throw std::invalid_argument("tau must be positive and finite");
    }
    if (!(q >= 0.0) || !std::isfinite(q)) {
        throw std::invalid_argument("q must be nonnegative and finite");
    }
    F_ = Eigen::Matrix4d::Identity();
    F_(0, 1) = tau;
    F_(2, 3) = tau;

    const double t2 = tau * tau;
    Eigen::Matrix2d block;
    block << t2 * t2 / 4.0, t2 * tau / 2.0, t2 * tau / 2.0, t2;
    Q_ = Eigen::Matrix4d::Zero();
    Q_.block<2, 2>(0, 0) = q * block;
    Q_.block<2, 2>(2, 2) = q * block;
}

StateVector MotionModel::propagate_mean(const StateVector& s) const {
    return {s.px + tau_ * s.vx, s.vx, s.py + tau_ * s.vy, s.vy};
}

StateVector MotionModel::propagate(const StateVector& s, RngStream& rng) const {
    // Each axis block of Q is q * v v^T, v = [tau^2/2, tau]^T: one normal per
    // axis scaled by sqrt(q) * v is an exact draw from N(0, Q).
    const double sq = std::sqrt(q_);
    const double half_t2 = tau_ * tau_ / 2.0;
    const double ax = sq * rng.normal();
    const double ay = sq * rng.normal();
    StateVector out = propagate_mean(s);
    out.px += half_t2 * ax;
    out.vx += tau_ * ax;
    out.py += half_t2 * ay;
    out.vy += tau_ * ay;
    return out;
}

}  // namespace tbdphd
