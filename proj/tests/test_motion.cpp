#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "tbdphd/motion.hpp"

using namespace tbdphd;

TEST_CASE("transition and noise matrices follow the per-axis blocks") {
    const MotionModel m(1.0, 8.1e-3);
    const auto& F = m.transition();
    CHECK(F(0, 0) == 1.0);
    CHECK(F(0, 1) == 1.0);
    CHECK(F(1, 1) == 1.0);
    CHECK(F(2, 3) == 1.0);
    CHECK(F(0, 2) == 0.0);
    CHECK(F(1, 0) == 0.0);

    const auto& Q = m.process_noise();
    CHECK(Q(0, 0) == doctest::Approx(8.1e-3 * 0.25).epsilon(1e-14));
    CHECK(Q(0, 1) == doctest::Approx(8.1e-3 * 0.5).epsilon(1e-14));
    CHECK(Q(1, 1) == doctest::Approx(8.1e-3).epsilon(1e-14));
    CHECK(Q(2, 2) == doctest::Approx(8.1e-3 * 0.25).epsilon(1e-14));
    CHECK(Q(0, 2) == 0.0);
    CHECK(Q(1, 3) == 0.0);

    const MotionModel m2(2.0, 0.5);
    CHECK(m2.transition()(0, 1) == 2.0);
    CHECK(m2.process_noise()(0, 0) == doctest::Approx(0.5 * 4.0).epsilon(1e-14));
    CHECK(m2.process_noise()(0, 1) == doctest::Approx(0.5 * 4.0).epsilon(1e-14));
    CHECK(m2.process_noise()(1, 1) == doctest::Approx(0.5 * 4.0).epsilon(1e-14));
}

TEST_CASE("deterministic propagation applies F") {
    const MotionModel m(1.0, 8.1e-3);
    const StateVector next = m.propagate_mean({0.0, 1.0, 5.0, -2.0});
    CHECK(next.px == 1.0);
    CHECK(next.vx == 1.0);
    CHECK(next.py == 3.0);
    CHECK(next.vy == -2.0);
}

TEST_CASE("sampled transitions have the prescribed second moments") {
    const double q = 8.1e-3;
    const MotionModel m(1.0, q);
    RngStream rng(17);
    const int n = 200000;
    double spp = 0.0, spv = 0.0, svv = 0.0, cross = 0.0;
    double mean_p = 0.0, mean_v = 0.0;
    for (int i = 0; i < n; ++i) {
        const StateVector s = m.propagate({0.0, 0.0, 0.0, 0.0}, rng);
        spp += s.px * s.px;
        spv += s.px * s.vx;
        svv += s.vx * s.vx;
        cross += s.px * s.vy;  // axes are independent
        mean_p += s.px;
        mean_v += s.vx;
    }
    const auto& Q = m.process_noise();
    CHECK(spp / n == doctest::Approx(Q(0, 0)).epsilon(0.05));
    CHECK(spv / n == doctest::Approx(Q(0, 1)).epsilon(0.05));
    CHECK(svv / n == doctest::Approx(Q(1, 1)).epsilon(0.05));
    CHECK(std::abs(cross / n) < 3.0 * q / std::sqrt(static_cast<double>(n)));
    CHECK(std::abs(mean_p / n) < 3.0 * std::sqrt(Q(0, 0) / n));
    CHECK(std::abs(mean_v / n) < 3.0 * std::sqrt(Q(1, 1) / n));
}

TEST_CASE("free function alias matches the member") {
    const MotionModel m(1.0, 8.1e-3);
    RngStream a(5), b(5);
    const StateVector s{10.0, 1.0, 20.0, -1.0};
    const StateVector x = m.propagate(s, a);
    const StateVector y = propagate_truth(s, m, b);
    CHECK(x.px == y.px);
    CHECK(x.vx == y.vx);
    CHECK(x.py == y.py);
    CHECK(x.vy == y.vy);
}

TEST_CASE("parameter validation") {
    CHECK_THROWS_AS(MotionModel(0.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(MotionModel(-1.0, 1.0), std::invalid_argument);
    CHECK_THROWS_AS(MotionModel(1.0, -1e-3), std::invalid_argument);
    CHECK_NOTHROW(MotionModel(1.0, 0.0));  // noiseless model is legal
}
