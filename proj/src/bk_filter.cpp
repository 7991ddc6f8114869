#include "tbdphd/bk_filter.hpp"

#include <cmath>
#include <stdexcept>
#include <utility>

namespace tbdphd {

void validate(const BkConfig& cfg) {
    if (!(cfg.kappa >= 0.0) || !std::isfinite(cfg.kappa)) {
        throw std::invalid_argument("kappa must be nonnegative and finite");
    }
}

BkUpdateResult bk_update(const IntensityParticles& predicted, const EchoFrame& frame,
                         const BkConfig& cfg, const GridSpec& grid,
                         const AmplitudeParams& params) {
    const int m = pixel_count(grid);
    if (static_cast<int>(frame.amplitudes.size()) != m) {
        throw std::invalid_argument("frame size does not match grid");
    }

    BkUpdateResult out;
    out.particles.scan_index = frame.scan_index;
    out.particles.components.reserve(predicted.components.size());

    // <g(z|.), v_pred> for pixel z splits into W * n(A_z) from all mass seeing
    // the noise density, corrected by (s(A_z) - n(A_z)) times the mass whose
    // illuminated set contains z. Point targets illuminate one cell, so the
    // occupied mass per cell comes from a single pass over the particles.
    double W = 0.0;
    std::vector<double> occupied_mass(static_cast<std::size_t>(m), 0.0);
    std::vector<std::vector<int>> pix_of_particle(predicted.components.size());
    for (std::size_t ci = 0; ci < predicted.components.size(); ++ci) {
        const auto& comp = predicted.components[ci];
        auto& pix = pix_of_particle[ci];
        pix.reserve(comp.particles.size());
        for (const auto& p : comp.particles) {
            W += p.weight;
            if (auto cell = pixel_of(p.state, grid)) {
                const int flat = grid.flat_index(*cell);
                occupied_mass[static_cast<std::size_t>(flat)] += p.weight;
                pix.push_back(flat);
            } else {
                pix.push_back(-1);
            }
        }
    }

    std::vector<double> noise_g(static_cast<std::size_t>(m));
    std::vector<double> signal_g(static_cast<std::size_t>(m));
    std::vector<double> inv_denom(static_cast<std::size_t>(m));
    double base_sum = 0.0;  // sum_z n(A_z) / (kappa(z) + <g, v_pred>)
    for (int z = 0; z < m; ++z) {
        const auto zi = static_cast<std::size_t>(z);
        const double a = frame.amplitudes[zi];
        const double n = noise_pdf(a, params);
        const double s = signal_pdf(a, params);
        noise_g[zi] = n;
        signal_g[zi] = s;
        const double kappa =
            cfg.kappa_mode == KappaMode::Constant ? cfg.kappa : cfg.kappa * n;
        const double denom = kappa + W * n + occupied_mass[zi] * (s - n);
        if (denom > 0.0) {
            inv_denom[zi] = 1.0 / denom;
            base_sum += n * inv_denom[zi];
        } else {
            // kappa = 0 with no predicted mass responding at this pixel: the
            // 0/0 summand is dropped for every particle.
            inv_denom[zi] = 0.0;
            ++out.skipped_summands;
        }
    }

    for (std::size_t ci = 0; ci < predicted.components.size(); ++ci) {
        const auto& comp = predicted.components[ci];
        TargetComponent upd{comp.id, {}};
        upd.particles.reserve(comp.particles.size());
        for (std::size_t pi = 0; pi < comp.particles.size(); ++pi) {
            const auto& p = comp.particles[pi];
            double factor = base_sum;
            const int flat = pix_of_particle[ci][pi];
            if (flat >= 0) {
                const auto zi = static_cast<std::size_t>(flat);
                // Swap this particle's own pixel from the noise to the signal
                // density; all other pixels keep g = noise.
                factor += (signal_g[zi] - noise_g[zi]) * inv_denom[zi];
            }
            const double w = p.weight * factor;
            out.total_mass += w;
            upd.particles.push_back({p.state, w});
        }
        out.particles.components.push_back(std::move(upd));
    }
    return out;
}

BkPhdFilter::BkPhdFilter(FilterConfig base, BkConfig bk, MotionModel model,
                         GridSpec grid, AmplitudeParams params, std::uint64_t seed)
    : base_(base),
      bk_(bk),
      model_(model),
      grid_(grid),
      params_(params),
      rng_(seed) {
    validate(base_);
    validate(bk_);
}

StepResult BkPhdFilter::step(const EchoFrame& frame) {
    auto pred = predict(posterior_, card_, prev_frame_ ? &*prev_frame_ : nullptr,
                        model_, base_, grid_, rng_, next_component_id_);
    auto upd = bk_update(pred.particles, frame, bk_, grid_, params_);
    auto pm = prune_merge(upd.particles, base_);
    auto post = resample(pm.particles, base_, rng_);
    auto ex = extract(post);

    StepResult r;
    r.scan_index = frame.scan_index;
    r.estimates = std::move(ex.estimates);
    r.n_hat = ex.n_hat;
    r.lambda = upd.total_mass;
    r.component_count = static_cast<int>(post.components.size());
    r.diagnostics.births = pred.births;
    r.diagnostics.pruned = pm.pruned;
    r.diagnostics.merged = pm.merged;
    r.diagnostics.post_update_components =
        static_cast<int>(upd.particles.components.size());
    r.diagnostics.post_update_total_mass = upd.total_mass;
    for (const auto& c : upd.particles.components) {
        r.diagnostics.post_update_max_component_mass =
            std::max(r.diagnostics.post_update_max_component_mass, c.mass());
    }
    r.diagnostics.skipped_summands = upd.skipped_summands;

    posterior_ = std::move(post);
    posterior_.scan_index = frame.scan_index;
    card_.rate = r.n_hat;
    prev_frame_ = frame;
    ++scan_;
    return r;
}

}  // namespace tbdphd
