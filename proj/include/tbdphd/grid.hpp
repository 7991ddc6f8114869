#pragma once

#include <optional>
#include <vector>

#include "tbdphd/types.hpp"

namespace tbdphd {

struct PixelIndex {
    int range_bin = 0;
    int bearing_bin = 0;

    bool operator==(const PixelIndex&) const = default;
};

struct RangeBearing {
    double range = 0.0;    // metres
    double bearing = 0.0;  // degrees
};

// Polar sensor raster: half-open field of view [range_min, range_max) x
// [bearing_min, bearing_max), split into uniform cells. Both extents must be
// whole multiples of their resolution.
class GridSpec {
public:
    GridSpec(double range_min, double range_max, double range_res,
             double bearing_min, double bearing_max, double bearing_res);

    double range_min() const { return range_min_; }
    double range_max() const { return range_max_; }
    double range_res() const { return range_res_; }
    double bearing_min() const { return bearing_min_; }
    double bearing_max() const { return bearing_max_; }
    double bearing_res() const { return bearing_res_; }

    int num_range_bins() const { return num_range_bins_; }
    int num_bearing_bins() const { return num_bearing_bins_; }

    bool contains(double range, double bearing) const {
        return range >= range_min_ && range < range_max_ &&
               bearing >= bearing_min_ && bearing < bearing_max_;
    }

    bool valid(PixelIndex p) const {
        return p.range_bin >= 0 && p.range_bin < num_range_bins_ &&
               p.bearing_bin >= 0 && p.bearing_bin < num_bearing_bins_;
    }

    // Row-major flat index, range-major: r * num_bearing_bins + b.
    int flat_index(PixelIndex p) const {
        return p.range_bin * num_bearing_bins_ + p.bearing_bin;
    }

    PixelIndex from_flat(int flat) const {
        return {flat / num_bearing_bins_, flat % num_bearing_bins_};
    }

private:
    double range_min_, range_max_, range_res_;
    double bearing_min_, bearing_max_, bearing_res_;
    int num_range_bins_, num_bearing_bins_;
};

// Total number of cells in the raster.
int pixel_count(const GridSpec& grid);

// Cell holding the Cartesian state's polar projection, or nullopt when the
// state falls outside the field of view. Bin edges are lower-inclusive.
std::optional<PixelIndex> pixel_of(const StateVector& state, const GridSpec& grid);

// Cells illuminated by a target at `state`. Point-target model: the single
// cell containing the state, empty outside the field of view.
std::vector<PixelIndex> illuminated_pixels(const StateVector& state,
                                           const GridSpec& grid);

// Centre of a cell in polar coordinates. Throws on out-of-bounds indices.
RangeBearing cell_center(PixelIndex p, const GridSpec& grid);

}  // namespace tbdphd
