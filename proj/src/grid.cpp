#include "tbdphd/grid.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tbdphd {

namespace {

constexpr double kRadToDeg = 57.29577951308232;

int bin_count(double lo, double hi, double res, const char* what) {
    if (!(res > 0.0)) {
        throw std::invalid_argument(std::string(what) + " resolution must be positive");
    }
    if (!(hi > lo)) {
        throw std::invalid_argument(std::string(what) + " extent must be increasing");
    }
    const double raw = (hi - lo) / res;
    const int n = static_cast<int>(std::lround(raw));
    if (n < 1 || std::abs(raw - n) > 1e-9 * std::max(1.0, raw)) {
        throw std::invalid_argument(std::string(what) +
                                    " extent must be a whole multiple of the resolution");
    }
    return n;
}

}  // namespace

GridSpec::GridSpec(double range_min, double range_max, double range_res,
                   double bearing_min, double bearing_max, double bearing_res)
    : range_min_(range_min),
      range_max_(range_max),
      range_res_(range_res),
      bearing_min_(bearing_min),
      bearing_max_(bearing_max),
      bearing_res_(bearing_res),
      num_range_bins_(bin_count(range_min, range_max, range_res, "range")),
      num_bearing_bins_(bin_count(bearing_min, bearing_max, bearing_res, "bearing")) {
    if (range_min_ < 0.0) {
        throw std::invalid_argument("range_min must be nonnegative");
    }
}

int pixel_count(const GridSpec& grid) {
    return grid.num_range_bins() * grid.num_bearing_bins();
}

std::optional<PixelIndex> pixel_of(const StateVector& state, const GridSpec& grid) {
    const double r = std::hypot(state.px, state.py);
    const double theta = std::atan2(state.py, state.px) * kRadToDeg;
    if (!grid.contains(r, theta)) return std::nullopt;
    PixelIndex p{static_cast<int>((r - grid.range_min()) / grid.range_res()),
                 static_cast<int>((theta - grid.bearing_min()) / grid.bearing_res())};
    // Guard the upper edge against floating-point round-up.
    if (p.range_bin >= grid.num_range_bins()) p.range_bin = grid.num_range_bins() - 1;
    if (p.bearing_bin >= grid.num_bearing_bins()) p.bearing_bin = grid.num_bearing_bins() - 1;
    return p;
}

std::vector<PixelIndex> illuminated_pixels(const StateVector& state,
                                           const GridSpec& grid) {
    auto p = pixel_of(state, grid);
    if (!p) return {};
    return {*p};
}

RangeBearing cell_center(PixelIndex p, const GridSpec& grid) {
    if (!grid.valid(p)) {
        throw std::out_of_range("pixel index (" + std::to_string(p.range_bin) + ", " +
                                std::to_string(p.bearing_bin) + ") outside grid");
    }
    return {grid.range_min() + (p.range_bin + 0.5) * grid.range_res(),
            grid.bearing_min() + (p.bearing_bin + 0.5) * grid.bearing_res()};
}

}  // namespace tbdphd
