#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "tbdphd/amplitude.hpp"
#include "tbdphd/frame.hpp"
#include "tbdphd/grid.hpp"
#include "tbdphd/motion.hpp"
#include "tbdphd/particles.hpp"
#include "tbdphd/rng.hpp"

namespace tbdphd {

// Knobs of the track-before-detect PHD recursion. Deliberately carries no
// detection-stage parameters (no detection probability, no clutter rate or
// clutter density): the update works on raw amplitudes.
struct FilterConfig {
    double survival_prob = 0.99;         // p_S
    double birth_weight = 0.08;          // mass of each newborn component
    int particles_per_component = 250;   // P_i
    double prune_threshold = 4e-3;       // on component mass
    double merge_threshold = 4.0;        // squared Mahalanobis distance
    double birth_threshold = 6.4;        // amplitude gate for birth pixels
    double birth_velocity_std = 3.0;     // m/s per axis for newborn particles
    bool capping_enabled = true;
};

// Throws std::invalid_argument naming the offending field.
void validate(const FilterConfig& cfg);

struct PredictResult {
    IntensityParticles particles;
    PoissonCardinality cardinality;
    int births = 0;
};

// Survival + measurement-driven birth. Survivors are propagated through the
// transition density with weights scaled by p_S. One newborn component per
// cell whose previous-frame amplitude exceeds birth_threshold and which held
// no posterior particle; newborn positions are uniform in the cell (polar,
// then Cartesian), velocities N(0, birth_velocity_std^2) per axis, total
// newborn mass = birth_weight. Predicted rate = p_S * rate + births * weight.
// frame_prev == nullptr (first scan) yields no births. Never reads the
// current frame.
PredictResult predict(const IntensityParticles& posterior, PoissonCardinality card,
                      const EchoFrame* frame_prev, const MotionModel& model,
                      const FilterConfig& cfg, const GridSpec& grid,
                      RngStream& rng, std::uint64_t& next_component_id);

struct UpdateResult {
    IntensityParticles particles;
    PoissonCardinality cardinality;  // rate == total post-update mass
    double max_component_mass = 0.0;
    int overflow_saturations = 0;       // uncapped log-weights clamped at kLogWeightSaturation
    int capped_overflow_components = 0; // non-finite component sums forced to mass 1
};

// Log-weight ceiling for the uncapped update: exp(700) is near the double
// overflow edge, large enough that divergence stays observable.
inline constexpr double kLogWeightSaturation = 700.0;

// Multiplies every particle weight by the frame likelihood ratio of its
// state. With capping enabled, each component's weights are then divided by
// max(component sum, 1), clamping the component mass at 1. The returned rate
// is exactly the summed post-update mass.
UpdateResult update(const IntensityParticles& predicted, const EchoFrame& frame,
                    const FilterConfig& cfg, const GridSpec& grid,
                    const AmplitudeParams& params);

// Per-component systematic resampling to exactly particles_per_component
// equal weights; component mass preserved exactly (weights are mass / P).
// Zero-mass components are dropped.
IntensityParticles resample(const IntensityParticles& in, const FilterConfig& cfg,
                            RngStream& rng);

struct PruneMergeResult {
    IntensityParticles particles;
    int pruned = 0;
    int merged = 0;
};

// Deletes components below prune_threshold, then greedily merges the
// highest-combined-mass pair whose position means sit within merge_threshold
// squared Mahalanobis distance (pooled weighted position covariance,
// regularized with 1e-6 * I when singular). Merging concatenates particles
// and keeps the heavier side's id.
PruneMergeResult prune_merge(const IntensityParticles& in, const FilterConfig& cfg);

struct Estimate {
    std::uint64_t component_id = 0;
    StateVector state;
};

struct ExtractResult {
    std::vector<Estimate> estimates;  // weighted mean state per component with mass >= 0.5
    double n_hat = 0.0;               // total mass, independent of the reporting gate
};

ExtractResult extract(const IntensityParticles& in);

struct StepDiagnostics {
    int births = 0;
    int pruned = 0;
    int merged = 0;
    int post_update_components = 0;
    double post_update_total_mass = 0.0;
    double post_update_max_component_mass = 0.0;
    int overflow_saturations = 0;
    int capped_overflow_components = 0;
    int skipped_summands = 0;  // baseline updater only
};

struct StepResult {
    int scan_index = 0;
    std::vector<Estimate> estimates;
    double n_hat = 0.0;   // posterior total mass after prune/merge/resample
    double lambda = 0.0;  // posterior cardinality rate straight from the update
    int component_count = 0;
    StepDiagnostics diagnostics;
};

// One filter instance per replication. step() composes
// predict -> update -> prune_merge -> resample -> extract in that order and
// retains the previous frame for the next scan's birth gate.
class TbdPhdFilter {
public:
    TbdPhdFilter(FilterConfig cfg, MotionModel model, GridSpec grid,
                 AmplitudeParams params, std::uint64_t seed);

    StepResult step(const EchoFrame& frame);

    const IntensityParticles& posterior() const { return posterior_; }
    PoissonCardinality cardinality() const { return card_; }
    int scans_processed() const { return scan_; }

private:
    FilterConfig cfg_;
    MotionModel model_;
    GridSpec grid_;
    AmplitudeParams params_;
    RngStream rng_;
    IntensityParticles posterior_;
    PoissonCardinality card_;
    std::optional<EchoFrame> prev_frame_;
    std::uint64_t next_component_id_ = 1;
    int scan_ = 0;
};

}  // namespace tbdphd
