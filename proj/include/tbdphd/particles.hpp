#pragma once

#include <cstdint>
#include <vector>

#include "tbdphd/types.hpp"

namespace tbdphd {

struct Particle {
    StateVector state;
    double weight = 0.0;
};

// One hypothesized target: a particle cloud whose summed weight is the
// component's expected count (mass). Ids are unique within a filter run and
// survive merging (the heavier side's id wins).
struct TargetComponent {
    std::uint64_t id = 0;
    std::vector<Particle> particles;

    double mass() const {
        double m = 0.0;
        for (const auto& p : particles) m += p.weight;
        return m;
    }
};

// Particle representation of the intensity function at one scan.
struct IntensityParticles {
    int scan_index = 0;
    std::vector<TargetComponent> components;

    double total_mass() const {
        double m = 0.0;
        for (const auto& c : components) m += c.mass();
        return m;
    }
};

// Poisson cardinality model: the number of targets is Poisson(rate), and
// rate always equals the intensity's total mass.
struct PoissonCardinality {
    double rate = 0.0;
};

}  // namespace tbdphd
