#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <vector>

#include "tbdphd/bk_filter.hpp"
#include "tbdphd/scenario.hpp"

using namespace tbdphd;

namespace {

const AmplitudeParams kAmp{1.5, 6.0};

GridSpec one_cell() { return {0.0, 2.5, 2.5, 0.0, 3.0, 3.0}; }
GridSpec two_cells() { return {0.0, 5.0, 2.5, 0.0, 3.0, 3.0}; }  // range bins 0, 1
GridSpec small_grid() { return {0.0, 10.0, 2.5, 0.0, 90.0, 30.0}; }

// A state inside range bin `bin` of the two_cells / one_cell geometries.
StateVector in_bin(int bin) {
    const double r = 2.5 * bin + 1.0;
    const double theta = 1.5 * 0.017453292519943295;
    return {r * std::cos(theta), 0.0, r * std::sin(theta), 0.0};
}

EchoFrame frame_of(const std::vector<double>& amps, int scan = 1) {
    return {scan, amps};
}

IntensityParticles one_component(const std::vector<std::pair<StateVector, double>>& ps) {
    IntensityParticles out;
    TargetComponent c{1, {}};
    for (const auto& [s, w] : ps) c.particles.push_back({s, w});
    out.components.push_back(std::move(c));
    return out;
}

}  // namespace

TEST_CASE("zero clutter on a single cell renormalizes any weight to one") {
    const GridSpec g = one_cell();
    REQUIRE(pixel_count(g) == 1);
    const BkConfig cfg{0.0, KappaMode::Constant};
    for (double w : {0.5, 2.0}) {
        const auto upd = bk_update(one_component({{in_bin(0), w}}),
                                   frame_of({3.0}), cfg, g, kAmp);
        REQUIRE(upd.particles.components.size() == 1);
        CHECK(upd.particles.components[0].particles[0].weight ==
              doctest::Approx(1.0).epsilon(1e-14));
        CHECK(upd.total_mass == doctest::Approx(1.0).epsilon(1e-14));
        CHECK(upd.skipped_summands == 0);
    }
}

TEST_CASE("two-cell update matches the per-pixel sum written out by hand") {
    const GridSpec g = two_cells();
    REQUIRE(pixel_count(g) == 2);
    const double a0 = 2.0, a1 = 7.0;
    const double w0 = 0.6, w1 = 0.3;
    const auto pred = one_component({{in_bin(0), w0}, {in_bin(1), w1}});

    const double n0 = noise_pdf(a0, kAmp), s0 = signal_pdf(a0, kAmp);
    const double n1 = noise_pdf(a1, kAmp), s1 = signal_pdf(a1, kAmp);
    const double W = w0 + w1;

    SUBCASE("constant clutter") {
        const double kappa = 2.0;
        const double d0 = kappa + W * n0 + w0 * (s0 - n0);
        const double d1 = kappa + W * n1 + w1 * (s1 - n1);
        const double f0 = s0 / d0 + n1 / d1;
        const double f1 = n0 / d0 + s1 / d1;

        const auto upd = bk_update(pred, frame_of({a0, a1}),
                                   {kappa, KappaMode::Constant}, g, kAmp);
        const auto& ps = upd.particles.components[0].particles;
        CHECK(ps[0].weight == doctest::Approx(w0 * f0).epsilon(1e-14));
        CHECK(ps[1].weight == doctest::Approx(w1 * f1).epsilon(1e-14));
        CHECK(upd.total_mass ==
              doctest::Approx(w0 * f0 + w1 * f1).epsilon(1e-14));
    }

    SUBCASE("clutter scaled by the noise density") {
        const double kappa = 3.0;
        const double d0 = kappa * n0 + W * n0 + w0 * (s0 - n0);
        const double d1 = kappa * n1 + W * n1 + w1 * (s1 - n1);
        const double f0 = s0 / d0 + n1 / d1;
        const double f1 = n0 / d0 + s1 / d1;

        const auto upd = bk_update(pred, frame_of({a0, a1}),
                                   {kappa, KappaMode::ScaledNoise}, g, kAmp);
        const auto& ps = upd.particles.components[0].particles;
        CHECK(ps[0].weight == doctest::Approx(w0 * f0).epsilon(1e-14));
        CHECK(ps[1].weight == doctest::Approx(w1 * f1).epsilon(1e-14));
    }
}

TEST_CASE("overwhelming clutter drives every updated weight to zero") {
    const GridSpec g = two_cells();
    const auto upd = bk_update(one_component({{in_bin(0), 0.8}, {in_bin(1), 0.4}}),
                               frame_of({2.0, 9.0}), {1e300, KappaMode::Constant},
                               g, kAmp);
    CHECK(upd.total_mass < 1e-280);
    for (const auto& p : upd.particles.components[0].particles) {
        CHECK(p.weight >= 0.0);
        CHECK(p.weight < 1e-280);
    }
}

TEST_CASE("updated mass never exceeds the number of cells") {
    const GridSpec g = small_grid();
    const int m = pixel_count(g);
    RngStream rng(909);
    for (int trial = 0; trial < 10; ++trial) {
        IntensityParticles pred;
        for (int c = 0; c < 3; ++c) {
            TargetComponent comp{static_cast<std::uint64_t>(c + 1), {}};
            for (int i = 0; i < 8; ++i) {
                comp.particles.push_back(
                    {{rng.uniform(0.0, 9.9), 0.0, rng.uniform(0.1, 9.9), 0.0},
                     rng.uniform(0.1, 3.0)});
            }
            pred.components.push_back(std::move(comp));
        }
        EchoFrame f;
        f.scan_index = 1;
        for (int z = 0; z < m; ++z) f.amplitudes.push_back(rng.rayleigh(3.0) + 1e-9);
        const double kappa = trial % 2 == 0 ? 0.0 : 0.5;
        const auto upd = bk_update(pred, f, {kappa, KappaMode::Constant}, g, kAmp);
        CHECK(upd.total_mass <= m + 1e-9);
        CHECK(upd.total_mass > 0.0);
    }
}

TEST_CASE("zero clutter with no predicted mass drops every summand") {
    const GridSpec g = small_grid();
    EchoFrame f = frame_of(std::vector<double>(static_cast<std::size_t>(pixel_count(g)), 2.0));
    const auto upd = bk_update({}, f, {0.0, KappaMode::Constant}, g, kAmp);
    CHECK(upd.skipped_summands == pixel_count(g));
    CHECK(upd.total_mass == 0.0);
    CHECK(upd.particles.components.empty());

    // Any predicted mass makes every denominator positive again.
    const auto alive = bk_update(one_component({{{1.0, 0.0, 1.0, 0.0}, 0.2}}), f,
                                 {0.0, KappaMode::Constant}, g, kAmp);
    CHECK(alive.skipped_summands == 0);
}

TEST_CASE("factorized update equals the direct per-pixel double sum") {
    const GridSpec g = small_grid();
    const int m = pixel_count(g);
    RngStream rng(4142);

    IntensityParticles pred;
    for (int c = 0; c < 3; ++c) {
        TargetComponent comp{static_cast<std::uint64_t>(c + 1), {}};
        for (int i = 0; i < 10; ++i) {
            // A quarter of the particles sit outside the field of view.
            const double range_hi = i % 4 == 0 ? 25.0 : 9.9;
            comp.particles.push_back(
                {{rng.uniform(0.0, range_hi), 0.0, rng.uniform(0.1, range_hi), 0.0},
                 rng.uniform(0.05, 0.8)});
        }
        pred.components.push_back(std::move(comp));
    }
    EchoFrame f;
    f.scan_index = 2;
    for (int z = 0; z < m; ++z) f.amplitudes.push_back(rng.rayleigh(2.5) + 1e-9);
    const BkConfig cfg{0.7, KappaMode::Constant};

    const auto upd = bk_update(pred, f, cfg, g, kAmp);

    // Direct O(cells x particles) evaluation of the same formula.
    std::vector<double> denom(static_cast<std::size_t>(m), cfg.kappa);
    for (int z = 0; z < m; ++z) {
        const double a = f.amplitudes[static_cast<std::size_t>(z)];
        for (const auto& comp : pred.components) {
            for (const auto& p : comp.particles) {
                const auto cell = pixel_of(p.state, g);
                const bool own = cell && g.flat_index(*cell) == z;
                denom[static_cast<std::size_t>(z)] +=
                    p.weight * (own ? signal_pdf(a, kAmp) : noise_pdf(a, kAmp));
            }
        }
    }
    for (std::size_t ci = 0; ci < pred.components.size(); ++ci) {
        for (std::size_t pi = 0; pi < pred.components[ci].particles.size(); ++pi) {
            const auto& p = pred.components[ci].particles[pi];
            const auto cell = pixel_of(p.state, g);
            double factor = 0.0;
            for (int z = 0; z < m; ++z) {
                const double a = f.amplitudes[static_cast<std::size_t>(z)];
                const bool own = cell && g.flat_index(*cell) == z;
                factor += (own ? signal_pdf(a, kAmp) : noise_pdf(a, kAmp)) /
                          denom[static_cast<std::size_t>(z)];
            }
            const double expect = p.weight * factor;
            CHECK(upd.particles.components[ci].particles[pi].weight ==
                  doctest::Approx(expect).epsilon(1e-12));
        }
    }
}

TEST_CASE("clutter validation rejects negative and non-finite rates") {
    CHECK_THROWS_AS(validate(BkConfig{-1.0, KappaMode::Constant}),
                    std::invalid_argument);
    CHECK_THROWS_AS(validate(BkConfig{std::nan(""), KappaMode::Constant}),
                    std::invalid_argument);
    CHECK_NOTHROW(validate(BkConfig{0.0, KappaMode::Constant}));
    CHECK_THROWS_AS(bk_update({}, frame_of({1.0}), BkConfig{}, small_grid(), kAmp),
                    std::invalid_argument);
}

TEST_CASE("baseline steps replay bit for bit under the same seed") {
    const GridSpec g{0.0, 200.0, 2.5, 0.0, 180.0, 3.0};
    const MotionModel model(1.0, 8.1e-3);
    std::vector<ScenarioTarget> scenario{{{50.0, 0.3, 80.0, -0.2}, 1, 8, 0.08}};
    RngStream sim_rng(61);
    const Simulation sim = simulate_scenario(scenario, model, g, {1.5, 12.0}, 8, sim_rng);

    BkPhdFilter fa(FilterConfig{}, BkConfig{1.0, KappaMode::Constant}, model, g,
                   {1.5, 12.0}, 333);
    BkPhdFilter fb(FilterConfig{}, BkConfig{1.0, KappaMode::Constant}, model, g,
                   {1.5, 12.0}, 333);
    for (const auto& frame : sim.frames) {
        const auto ra = fa.step(frame);
        const auto rb = fb.step(frame);
        CHECK(ra.n_hat == rb.n_hat);
        CHECK(ra.lambda == rb.lambda);
        CHECK(ra.component_count == rb.component_count);
        CHECK(ra.diagnostics.post_update_total_mass ==
              rb.diagnostics.post_update_total_mass);
        CHECK(ra.lambda ==
              doctest::Approx(ra.diagnostics.post_update_total_mass).epsilon(1e-15));
    }
}
