#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "tbdphd/config.hpp"
#include "tbdphd/ospa.hpp"

namespace tbdphd {

inline constexpr const char* kTbdFilterName = "tbd_phd";
inline constexpr const char* kBkFilterName = "bk_phd";

// Scoring parameters for every experiment (config schema stays closed).
inline const OspaParams kScoringOspa{8.0, 2.0};

struct ScanRecord {
    int replication = 0;
    std::string filter;
    int scan = 0;
    double ospa_total = 0.0;
    double ospa_loc = 0.0;
    double ospa_card = 0.0;
    double n_hat = 0.0;
    int n_true = 0;
    double lambda = 0.0;
    int component_count = 0;
};

struct EstimateRecord {
    int replication = 0;
    std::string filter;
    int scan = 0;
    std::uint64_t component_id = 0;
    StateVector state;
};

struct ReplicationOutput {
    int replication = 0;
    std::vector<ScanRecord> records;
    std::vector<EstimateRecord> estimates;
    bool failed = false;
    std::string error;
};

// One paired replication: simulate truth + frames from the replication's sim
// stream, then run both filters on the identical frames with their own
// streams. Exceptions are captured into `failed`/`error`.
ReplicationOutput run_replication(const ExperimentConfig& cfg, int replication);

struct ExperimentResult {
    std::vector<ScanRecord> records;      // ordered by (replication, filter, scan)
    std::vector<EstimateRecord> estimates;
    std::vector<std::string> failures;
    std::filesystem::path results_path;
    std::filesystem::path estimates_path;
    std::filesystem::path summary_path;
};

// Runs all replications (worker pool of `jobs` threads, output independent of
// scheduling), writes results.csv, estimates.csv and summary.csv under
// cfg.output_dir. Floats are serialized with 17 significant digits.
ExperimentResult run_experiment(const ExperimentConfig& cfg, int jobs = 1);

struct ComparisonRow {
    int scan = 0;  // 0 for the overall row
    double tbd_ospa_mean = 0.0;
    double bk_ospa_mean = 0.0;
    double ospa_diff = 0.0;  // tbd - bk
    double tbd_card_err_mean = 0.0;
    double bk_card_err_mean = 0.0;
};

// Reads results.csv under results_dir and emits comparison.csv: per-scan and
// overall mean OSPA per filter, their difference, and mean |n_hat - n_true|.
// Errors if either filter tag is absent or scan counts disagree.
std::vector<ComparisonRow> compare_summary(const std::filesystem::path& results_dir);

// Deterministic clutter tuning for the baseline: grid-search kappa over
// `grid_values`, each evaluated on `tuning_replications` replications drawn
// from a seed lane disjoint from evaluation replications, returning the value
// with the lowest overall mean OSPA (ties break low).
double tune_kappa(const ExperimentConfig& cfg, const std::vector<double>& grid_values,
                  int tuning_replications);

// Log-spaced default grid, 1e-3 .. 300, four points per decade.
std::vector<double> default_kappa_grid();

// Writes one CSV amplitude matrix per scan (rows = range bins) plus truth.csv
// for a single replication's simulation.
void dump_frames(const ExperimentConfig& cfg, int replication,
                 const std::filesystem::path& out_dir);

}  // namespace tbdphd
