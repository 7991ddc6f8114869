#include "tbdphd/scenario.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace tbdphd {

void validate_scenario(const std::vector<ScenarioTarget>& targets) {
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const auto& t = targets[i];
        const std::string where = "scenario target " + std::to_string(i + 1);
        if (t.birth_time < 1) {
            throw std::invalid_argument(where + ": birth_time must be >= 1");
        }
        if (t.lasting_time < 1) {
            throw std::invalid_argument(where + ": lasting_time must be >= 1");
        }
        if (!(t.birth_weight > 0.0) || !std::isfinite(t.birth_weight)) {
            throw std::invalid_argument(where + ": birth_weight must be positive");
        }
    }
}

TruthTable::TruthTable(const std::vector<ScenarioTarget>& targets,
                       const MotionModel& model, int scan_count, RngStream& rng)
    : targets_(targets), scan_count_(scan_count) {
    if (scan_count < 1) {
        throw std::invalid_argument("scan_count must be >= 1");
    }
    validate_scenario(targets);
    tracks_.reserve(targets.size());
    for (const auto& t : targets) {
        std::vector<StateVector> track;
        const int last = std::min(t.birth_time + t.lasting_time - 1, scan_count);
        if (t.birth_time <= scan_count) {
            track.reserve(static_cast<std::size_t>(last - t.birth_time + 1));
            StateVector s = t.initial_state;
            track.push_back(s);
            for (int k = t.birth_time + 1; k <= last; ++k) {
                s = model.propagate(s, rng);
                track.push_back(s);
            }
        }
        tracks_.push_back(std::move(track));
    }
}

int TruthTable::alive_count(int scan) const {
    int n = 0;
    for (const auto& t : targets_) n += t.alive_at(scan) ? 1 : 0;
    return n;
}

std::vector<TruthPoint> TruthTable::at(int scan) const {
    std::vector<TruthPoint> out;
    for (std::size_t i = 0; i < targets_.size(); ++i) {
        const auto& t = targets_[i];
        if (!t.alive_at(scan) || scan > scan_count_) continue;
        out.push_back({static_cast<int>(i + 1),
                       tracks_[i][static_cast<std::size_t>(scan - t.birth_time)]});
    }
    return out;
}

EchoFrame synthesize_frame(const std::vector<StateVector>& truth_states,
                           const GridSpec& grid, const AmplitudeParams& amp,
                           RngStream& rng, int scan_index, int* collisions) {
    const int m = pixel_count(grid);
    std::vector<char> lit(static_cast<std::size_t>(m), 0);
    for (const auto& s : truth_states) {
        for (const PixelIndex p : illuminated_pixels(s, grid)) {
            auto& cell = lit[static_cast<std::size_t>(grid.flat_index(p))];
            if (cell && collisions) ++*collisions;
            cell = 1;
        }
    }
    EchoFrame frame;
    frame.scan_index = scan_index;
    frame.amplitudes.resize(static_cast<std::size_t>(m));
    for (int i = 0; i < m; ++i) {
        const double sigma = lit[static_cast<std::size_t>(i)]
                                 ? std::sqrt(amp.signal_var())
                                 : amp.sigma_n;
        frame.amplitudes[static_cast<std::size_t>(i)] = rng.rayleigh(sigma);
    }
    return frame;
}

Simulation simulate_scenario(const std::vector<ScenarioTarget>& targets,
                             const MotionModel& model, const GridSpec& grid,
                             const AmplitudeParams& amp, int scan_count,
                             RngStream& rng) {
    Simulation sim{TruthTable(targets, model, scan_count, rng), {}, 0};
    sim.frames.reserve(static_cast<std::size_t>(scan_count));
    for (int k = 1; k <= scan_count; ++k) {
        std::vector<StateVector> states;
        for (const auto& tp : sim.truth.at(k)) states.push_back(tp.state);
        sim.frames.push_back(
            synthesize_frame(states, grid, amp, rng, k, &sim.collisions));
    }
    return sim;
}

std::vector<ScenarioTarget> benchmark_scenario(bool corrected) {
    std::vector<ScenarioTarget> t{
        {{-135.0, 0.9, 10.0, 0.4}, 1, 40, 0.08},
        {{-90.0, 0.2, 60.0, 0.8}, 8, 33, 0.08},
        {{-45.0, 0.8, 20.0, 2.0}, 8, 38, 0.08},
        {{90.0, 100.0, -1.4, -0.4}, 16, 17, 0.08},
        {{45.0, -0.3, 20.0, 1.6}, 16, 17, 0.08},
        {{0.0, -0.6, 180.0, -1.2}, 24, 17, 0.08},
        {{135.0, -0.2, 10.0, 3.0}, 24, 9, 0.08},
        {{-90.0, 0.6, 140.0, -1.2}, 16, 25, 0.08},
    };
    if (corrected) {
        // The printed fourth entry reads [90, 100, -1.4, -0.4]: a 100 m/s
        // velocity and a position below the field of view. Repaired to the
        // plainly intended 1.0 m/s velocity and 140 m ordinate.
        t[3].initial_state = {90.0, 1.0, 140.0, -0.4};
    }
    return t;
}

}  // namespace tbdphd
