#pragma once

#include <cstdint>
#include <optional>

#include "tbdphd/filter.hpp"

namespace tbdphd {

enum class KappaMode {
    Constant,     // kappa(z) = kappa
    ScaledNoise,  // kappa(z) = kappa * noise_pdf(A_z), kappa acting as lambda_c * V
};

// Baseline updater knobs. Prediction, resampling, pruning and extraction are
// shared with FilterConfig; only the clutter intensity is new.
struct BkConfig {
    double kappa = 1.0;
    KappaMode kappa_mode = KappaMode::Constant;
};

void validate(const BkConfig& cfg);

struct BkUpdateResult {
    IntensityParticles particles;
    double total_mass = 0.0;
    int skipped_summands = 0;  // pixels where kappa + <g, v_pred> == 0 (0/0 dropped)
};

// Detection-style PHD update applied per pixel measurement:
//   w' = w * sum_z g(z|x) / (kappa(z) + <g(z|.), v_pred>)
// with g(z|x) = signal_pdf(A_z) when the pixel lies in the state's
// illuminated set, noise_pdf(A_z) otherwise. Every cell of the frame
// contributes one summand. Evaluated in O(pixels + particles) by splitting
// each denominator into a frame-wide part (all particles see noise density)
// plus a correction for the mass actually occupying the pixel.
BkUpdateResult bk_update(const IntensityParticles& predicted, const EchoFrame& frame,
                         const BkConfig& cfg, const GridSpec& grid,
                         const AmplitudeParams& params);

// Baseline filter: shares predict / prune_merge / resample / extract with
// TbdPhdFilter and swaps only the updater. StepResult.lambda carries the
// post-update total mass.
class BkPhdFilter {
public:
    BkPhdFilter(FilterConfig base, BkConfig bk, MotionModel model, GridSpec grid,
                AmplitudeParams params, std::uint64_t seed);

    StepResult step(const EchoFrame& frame);

    const IntensityParticles& posterior() const { return posterior_; }

private:
    FilterConfig base_;
    BkConfig bk_;
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
