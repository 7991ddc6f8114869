#include "tbdphd/filter.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <utility>

namespace tbdphd {

namespace {

constexpr double kDegToRad = 0.017453292519943295;
constexpr double kExtractGate = 0.5;
constexpr double kCovRegularization = 1e-6;
constexpr double kNegInf = -std::numeric_limits<double>::infinity();

}  // namespace

void validate(const FilterConfig& cfg) {
    if (!(cfg.survival_prob > 0.0 && cfg.survival_prob <= 1.0)) {
        throw std::invalid_argument("survival_prob must be in (0, 1]");
    }
    if (!(cfg.birth_weight > 0.0) || !std::isfinite(cfg.birth_weight)) {
        throw std::invalid_argument("birth_weight must be positive");
    }
    if (cfg.particles_per_component < 1) {
        throw std::invalid_argument("particles_per_component must be >= 1");
    }
    if (!(cfg.prune_threshold > 0.0)) {
        throw std::invalid_argument("prune_threshold must be positive");
    }
    if (!(cfg.merge_threshold > 0.0)) {
        throw std::invalid_argument("merge_threshold must be positive");
    }
    if (!(cfg.birth_threshold > 0.0)) {
        throw std::invalid_argument("birth_threshold must be positive");
    }
    if (!(cfg.birth_velocity_std > 0.0)) {
        throw std::invalid_argument("birth_velocity_std must be positive");
    }
}

PredictResult predict(const IntensityParticles& posterior, PoissonCardinality card,
                      const EchoFrame* frame_prev, const MotionModel& model,
                      const FilterConfig& cfg, const GridSpec& grid,
                      RngStream& rng, std::uint64_t& next_component_id) {
    PredictResult out;
    out.particles.scan_index = posterior.scan_index + 1;

    // Survivors: bootstrap proposal, so the importance ratio collapses to p_S.
    for (const auto& comp : posterior.components) {
        TargetComponent next{comp.id, {}};
        next.particles.reserve(comp.particles.size());
        for (const auto& p : comp.particles) {
            next.particles.push_back(
                {model.propagate(p.state, rng), cfg.survival_prob * p.weight});
        }
        out.particles.components.push_back(std::move(next));
    }

    // Births: cells loud enough on the previous frame and unoccupied by the
    // previous posterior, visited in flat order.
    if (frame_prev != nullptr) {
        std::vector<char> occupied(static_cast<std::size_t>(pixel_count(grid)), 0);
        for (const auto& comp : posterior.components) {
            for (const auto& p : comp.particles) {
                if (auto pix = pixel_of(p.state, grid)) {
                    occupied[static_cast<std::size_t>(grid.flat_index(*pix))] = 1;
                }
            }
        }
        const double w = cfg.birth_weight / cfg.particles_per_component;
        for (int flat = 0; flat < pixel_count(grid); ++flat) {
            if (occupied[static_cast<std::size_t>(flat)]) continue;
            if (!(frame_prev->amplitudes[static_cast<std::size_t>(flat)] >
                  cfg.birth_threshold)) {
                continue;
            }
            const PixelIndex pix = grid.from_flat(flat);
            const double r_lo = grid.range_min() + pix.range_bin * grid.range_res();
            const double b_lo = grid.bearing_min() + pix.bearing_bin * grid.bearing_res();
            TargetComponent born{next_component_id++, {}};
            born.particles.reserve(static_cast<std::size_t>(cfg.particles_per_component));
            for (int j = 0; j < cfg.particles_per_component; ++j) {
                const double r = rng.uniform(r_lo, r_lo + grid.range_res());
                const double theta = rng.uniform(b_lo, b_lo + grid.bearing_res()) * kDegToRad;
                StateVector s;
                s.px = r * std::cos(theta);
                s.py = r * std::sin(theta);
                s.vx = rng.normal(0.0, cfg.birth_velocity_std);
                s.vy = rng.normal(0.0, cfg.birth_velocity_std);
                born.particles.push_back({s, w});
            }
            out.particles.components.push_back(std::move(born));
            ++out.births;
        }
    }

    out.cardinality.rate = cfg.survival_prob * card.rate + out.births * cfg.birth_weight;
    return out;
}

UpdateResult update(const IntensityParticles& predicted, const EchoFrame& frame,
                    const FilterConfig& cfg, const GridSpec& grid,
                    const AmplitudeParams& params) {
    UpdateResult out;
    out.particles.scan_index = frame.scan_index;
    out.particles.components.reserve(predicted.components.size());

    double total = 0.0;
    std::vector<double> logw;
    for (const auto& comp : predicted.components) {
        logw.clear();
        logw.reserve(comp.particles.size());
        double mx = kNegInf;
        for (const auto& p : comp.particles) {
            const double lw = (p.weight > 0.0 ? std::log(p.weight) : kNegInf) +
                              log_target_lr(frame, p.state, grid, params);
            logw.push_back(lw);
            mx = std::max(mx, lw);
        }

        // log of the component's raw updated mass, accumulated in fixed order.
        double log_sum = kNegInf;
        if (mx > kNegInf) {
            double acc = 0.0;
            for (double lw : logw) acc += std::exp(lw - mx);
            log_sum = mx + std::log(acc);
        }

        TargetComponent upd{comp.id, {}};
        upd.particles.reserve(comp.particles.size());
        bool bad = !std::isfinite(log_sum) && log_sum != kNegInf;
        if (!bad) {
            if (cfg.capping_enabled) {
                // Divide by max(raw mass, 1): caps the component mass at 1.
                const double shift = std::max(log_sum, 0.0);
                for (std::size_t j = 0; j < logw.size(); ++j) {
                    upd.particles.push_back(
                        {comp.particles[j].state, std::exp(logw[j] - shift)});
                }
            } else {
                for (std::size_t j = 0; j < logw.size(); ++j) {
                    double lw = logw[j];
                    if (lw > kLogWeightSaturation) {
                        lw = kLogWeightSaturation;
                        ++out.overflow_saturations;
                    }
                    upd.particles.push_back({comp.particles[j].state, std::exp(lw)});
                }
            }
        }

        double mass = 0.0;
        for (const auto& p : upd.particles) mass += p.weight;
        if (bad || !std::isfinite(mass)) {
            // Amplitude data produced a non-finite sum: fall back to a unit
            // mass spread uniformly over the cloud and count the event.
            upd.particles.clear();
            const double w = 1.0 / static_cast<double>(comp.particles.size());
            for (const auto& p : comp.particles) upd.particles.push_back({p.state, w});
            mass = 1.0;
            ++out.capped_overflow_components;
        }
        total += mass;
        out.max_component_mass = std::max(out.max_component_mass, mass);
        out.particles.components.push_back(std::move(upd));
    }
    out.cardinality.rate = total;
    return out;
}

IntensityParticles resample(const IntensityParticles& in, const FilterConfig& cfg,
                            RngStream& rng) {
    IntensityParticles out;
    out.scan_index = in.scan_index;
    out.components.reserve(in.components.size());
    const int P = cfg.particles_per_component;
    for (const auto& comp : in.components) {
        const double mass = comp.mass();
        if (!(mass > 0.0)) continue;
        TargetComponent next{comp.id, {}};
        next.particles.reserve(static_cast<std::size_t>(P));
        const double offset = rng.uniform01();
        std::size_t j = 0;
        double cum = comp.particles[0].weight;
        for (int i = 0; i < P; ++i) {
            const double pos = (i + offset) / P * mass;
            while (cum < pos && j + 1 < comp.particles.size()) {
                ++j;
                cum += comp.particles[j].weight;
            }
            next.particles.push_back({comp.particles[j].state, mass / P});
        }
        out.components.push_back(std::move(next));
    }
    return out;
}

namespace {

struct ComponentStats {
    double mass = 0.0;
    Eigen::Vector2d mean = Eigen::Vector2d::Zero();
    Eigen::Matrix2d cov = Eigen::Matrix2d::Zero();
};

ComponentStats position_stats(const TargetComponent& comp) {
    ComponentStats s;
    for (const auto& p : comp.particles) {
        s.mass += p.weight;
        s.mean += p.weight * p.state.position();
    }
    if (s.mass > 0.0) s.mean /= s.mass;
    for (const auto& p : comp.particles) {
        const Eigen::Vector2d d = p.state.position() - s.mean;
        s.cov += p.weight * (d * d.transpose());
    }
    if (s.mass > 0.0) s.cov /= s.mass;
    return s;
}

// Squared Mahalanobis distance between component means under the pooled
// weighted covariance; adds kCovRegularization * I when the pool is singular.
double merge_distance(const ComponentStats& a, const ComponentStats& b) {
    const Eigen::Vector2d d = a.mean - b.mean;
    Eigen::Matrix2d c = (a.mass * a.cov + b.mass * b.cov) / (a.mass + b.mass);
    double det = c(0, 0) * c(1, 1) - c(0, 1) * c(1, 0);
    if (!(det > 0.0) || !std::isfinite(det)) {
        c(0, 0) += kCovRegularization;
        c(1, 1) += kCovRegularization;
        det = c(0, 0) * c(1, 1) - c(0, 1) * c(1, 0);
    }
    if (!(det > 0.0) || !std::isfinite(det)) {
        return std::numeric_limits<double>::infinity();
    }
    return (d[0] * d[0] * c(1, 1) - 2.0 * d[0] * d[1] * c(0, 1) +
            d[1] * d[1] * c(0, 0)) / det;
}

}  // namespace

PruneMergeResult prune_merge(const IntensityParticles& in, const FilterConfig& cfg) {
    PruneMergeResult out;
    out.particles.scan_index = in.scan_index;
    for (const auto& comp : in.components) {
        if (comp.mass() < cfg.prune_threshold) {
            ++out.pruned;
        } else {
            out.particles.components.push_back(comp);
        }
    }

    auto& comps = out.particles.components;
    std::vector<ComponentStats> stats;
    stats.reserve(comps.size());
    for (const auto& c : comps) stats.push_back(position_stats(c));

    while (comps.size() > 1) {
        // Highest-combined-mass pair within the merge gate goes first.
        std::size_t bi = 0, bj = 0;
        double best = -1.0;
        for (std::size_t i = 0; i + 1 < comps.size(); ++i) {
            for (std::size_t j = i + 1; j < comps.size(); ++j) {
                if (merge_distance(stats[i], stats[j]) >= cfg.merge_threshold) continue;
                const double m = stats[i].mass + stats[j].mass;
                if (m > best) {
                    best = m;
                    bi = i;
                    bj = j;
                }
            }
        }
        if (best < 0.0) break;

        auto& keep = comps[bi];
        auto& drop = comps[bj];
        if (drop.mass() > keep.mass()) keep.id = drop.id;
        keep.particles.insert(keep.particles.end(), drop.particles.begin(),
                              drop.particles.end());
        comps.erase(comps.begin() + static_cast<std::ptrdiff_t>(bj));
        stats[bi] = position_stats(keep);
        stats.erase(stats.begin() + static_cast<std::ptrdiff_t>(bj));
        ++out.merged;
    }
    return out;
}

ExtractResult extract(const IntensityParticles& in) {
    ExtractResult out;
    for (const auto& comp : in.components) {
        const double mass = comp.mass();
        out.n_hat += mass;
        if (mass < kExtractGate) continue;
        Eigen::Vector4d acc = Eigen::Vector4d::Zero();
        for (const auto& p : comp.particles) acc += p.weight * p.state.to_vector();
        out.estimates.push_back({comp.id, StateVector::from_vector(acc / mass)});
    }
    return out;
}

TbdPhdFilter::TbdPhdFilter(FilterConfig cfg, MotionModel model, GridSpec grid,
                           AmplitudeParams params, std::uint64_t seed)
    : cfg_(cfg),
      model_(model),
      grid_(grid),
      params_(params),
      rng_(seed) {
    validate(cfg_);
}

StepResult TbdPhdFilter::step(const EchoFrame& frame) {
    auto pred = predict(posterior_, card_, prev_frame_ ? &*prev_frame_ : nullptr,
                        model_, cfg_, grid_, rng_, next_component_id_);
    auto upd = update(pred.particles, frame, cfg_, grid_, params_);
    auto pm = prune_merge(upd.particles, cfg_);
    auto post = resample(pm.particles, cfg_, rng_);
    auto ex = extract(post);

    StepResult r;
    r.scan_index = frame.scan_index;
    r.estimates = std::move(ex.estimates);
    r.n_hat = ex.n_hat;
    r.lambda = upd.cardinality.rate;
    r.component_count = static_cast<int>(post.components.size());
    r.diagnostics.births = pred.births;
    r.diagnostics.pruned = pm.pruned;
    r.diagnostics.merged = pm.merged;
    r.diagnostics.post_update_components =
        static_cast<int>(upd.particles.components.size());
    r.diagnostics.post_update_total_mass = upd.cardinality.rate;
    r.diagnostics.post_update_max_component_mass = upd.max_component_mass;
    r.diagnostics.overflow_saturations = upd.overflow_saturations;
    r.diagnostics.capped_overflow_components = upd.capped_overflow_components;

    posterior_ = std::move(post);
    posterior_.scan_index = frame.scan_index;
    card_.rate = r.n_hat;
    prev_frame_ = frame;
    ++scan_;
    return r;
}

}  // namespace tbdphd
