#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "tbdphd/amplitude.hpp"
#include "tbdphd/bk_filter.hpp"
#include "tbdphd/filter.hpp"
#include "tbdphd/grid.hpp"
#include "tbdphd/scenario.hpp"

namespace tbdphd {

struct MotionParams {
    double tau = 1.0;
    double q = 8.1e-3;
};

// Everything one experiment needs. Constructed only through the loader or a
// preset so it is valid by construction.
struct ExperimentConfig {
    GridSpec grid;
    MotionParams motion;
    AmplitudeParams amplitude;
    std::vector<ScenarioTarget> scenario;
    FilterConfig filter;
    BkConfig baseline;
    int replications = 1;
    std::uint64_t master_seed = 0;
    int scan_count = 1;
    std::string output_dir = "results";
};

// Parses and validates a JSON config. Every field is required; violations
// are reported with the full field path, and unknown keys are rejected.
ExperimentConfig load_config(const std::string& path);
ExperimentConfig parse_config(const nlohmann::json& doc);

nlohmann::json to_json(const ExperimentConfig& cfg);

// Built-in benchmark configs: "table1_verbatim" keeps the printed fourth
// target, "table1_corrected" uses the repaired entry. Throws on unknown names.
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace tbdphd
