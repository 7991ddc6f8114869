#pragma once

#include <vector>

#include "tbdphd/grid.hpp"

namespace tbdphd {

// One full scan of the sensor: an amplitude per cell, stored row-major in
// the same flat order as GridSpec::flat_index. Amplitudes are strictly
// positive (Rayleigh-distributed envelopes).
struct EchoFrame {
    int scan_index = 0;
    std::vector<double> amplitudes;

    double at(const GridSpec& grid, PixelIndex p) const {
        return amplitudes[static_cast<std::size_t>(grid.flat_index(p))];
    }
};

}  // namespace tbdphd
