#include <cmath>
#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "tbdphd/config.hpp"
#include "tbdphd/experiment.hpp"
#include "tbdphd/poisson.hpp"

namespace {

using namespace tbdphd;

struct CommonOpts {
    std::string config_path;
    std::string preset_name = "table1_corrected";
    std::uint64_t seed = 0;
    bool seed_set = false;
    int replications = 0;
    int snr = 0;
    bool no_capping = false;
    std::string out_dir;
};

void add_config_opts(CLI::App* cmd, CommonOpts& o) {
    auto* cfg = cmd->add_option("--config", o.config_path, "Config file (JSON)");
    cmd->add_option("--preset", o.preset_name,
                    "Built-in config: table1_corrected or table1_verbatim")
        ->excludes(cfg);
    cmd->add_option("--seed", o.seed, "Master seed override")
        ->each([&o](const std::string&) { o.seed_set = true; });
    cmd->add_option("--replications", o.replications, "Replication count override")
        ->check(CLI::PositiveNumber);
    cmd->add_option("--snr", o.snr,
                    "SNR case in dB: 12 (sigma_s = 6) or 18 (sigma_s = 12)")
        ->check(CLI::IsMember({12, 18}));
    cmd->add_flag("--no-capping", o.no_capping,
                  "Disable per-component capping (divergence demo)");
    cmd->add_option("--out", o.out_dir, "Output directory override");
}

ExperimentConfig resolve_config(const CommonOpts& o) {
    ExperimentConfig cfg =
        o.config_path.empty() ? preset(o.preset_name) : load_config(o.config_path);
    if (o.seed_set) cfg.master_seed = o.seed;
    if (o.replications > 0) cfg.replications = o.replications;
    if (o.snr == 12) cfg.amplitude = AmplitudeParams(1.5, 6.0);
    if (o.snr == 18) cfg.amplitude = AmplitudeParams(1.5, 12.0);
    if (o.no_capping) cfg.filter.capping_enabled = false;
    // Precedence: --out beats TBDPHD_OUTPUT_DIR beats the config value.
    if (const char* env = std::getenv("TBDPHD_OUTPUT_DIR"); env && *env) {
        cfg.output_dir = env;
    }
    if (!o.out_dir.empty()) cfg.output_dir = o.out_dir;
    return cfg;
}

int cmd_run(const CommonOpts& o, int jobs, bool tune) {
    ExperimentConfig cfg = resolve_config(o);
    if (tune) {
        const double kappa = tune_kappa(cfg, default_kappa_grid(), 5);
        cfg.baseline.kappa = kappa;
        std::cout << "tuned baseline kappa = " << kappa << "\n";
    }
    const ExperimentResult res = run_experiment(cfg, jobs);
    std::cout << "wrote " << res.results_path.string() << " ("
              << res.records.size() << " records), " << res.summary_path.string()
              << "\n";
    for (const auto& f : res.failures) std::cerr << "FAILED " << f << "\n";

    const auto table = compare_summary(cfg.output_dir);
    for (const auto& row : table) {
        if (row.scan != 0) continue;
        std::cout << "overall mean OSPA: " << kTbdFilterName << " = "
                  << row.tbd_ospa_mean << ", " << kBkFilterName << " = "
                  << row.bk_ospa_mean << " (diff " << row.ospa_diff << ")\n";
        std::cout << "overall mean |n_hat - n_true|: " << kTbdFilterName << " = "
                  << row.tbd_card_err_mean << ", " << kBkFilterName << " = "
                  << row.bk_card_err_mean << "\n";
    }
    return res.failures.empty() ? 0 : 1;
}

int cmd_simulate(const CommonOpts& o, int replication) {
    const ExperimentConfig cfg = resolve_config(o);
    const std::filesystem::path dir =
        std::filesystem::path(cfg.output_dir) / "frames";
    dump_frames(cfg, replication, dir);
    std::cout << "wrote " << cfg.scan_count << " frames and truth.csv under "
              << dir.string() << "\n";
    return 0;
}

int cmd_summarize(const std::string& results_dir) {
    const auto table = compare_summary(results_dir);
    std::cout << "wrote " << (std::filesystem::path(results_dir) / "comparison.csv").string()
              << " (" << table.size() << " rows)\n";
    for (const auto& row : table) {
        if (row.scan != 0) continue;
        std::cout << "overall mean OSPA: " << kTbdFilterName << " = "
                  << row.tbd_ospa_mean << ", " << kBkFilterName << " = "
                  << row.bk_ospa_mean << " (diff " << row.ospa_diff << ")\n";
    }
    return 0;
}

// Randomized self-check of the cardinality toolbox: exact enumeration vs the
// closed-form posterior family, pmf convolution, and the KLD minimizer.
int cmd_oracle(int instances, std::uint64_t seed) {
    RngStream rng(seed);
    int failures = 0;

    double worst_tv = 0.0, worst_cell = 0.0;
    for (int i = 0; i < instances; ++i) {
        const int cells = 1 + static_cast<int>(rng.uniform01() * 8);
        DiscreteIntensity prior;
        std::vector<double> lr;
        for (int c = 0; c < cells; ++c) {
            prior.v.push_back(rng.uniform(0.0, 2.0 / cells));
            lr.push_back(rng.uniform(0.05, 20.0));
        }
        const int n_max = 200;
        const auto post = exact_posterior(prior, lr, n_max);
        double lv = 0.0;
        for (int c = 0; c < cells; ++c) lv += lr[static_cast<std::size_t>(c)] *
                                               prior.v[static_cast<std::size_t>(c)];
        worst_tv = std::max(
            worst_tv, total_variation(post.cardinality, truncated_poisson(lv, n_max)));
        for (int c = 0; c < cells; ++c) {
            worst_cell = std::max(worst_cell,
                                  std::abs(post.intensity.v[static_cast<std::size_t>(c)] -
                                           lr[static_cast<std::size_t>(c)] *
                                               prior.v[static_cast<std::size_t>(c)]));
        }
    }
    const bool conj_ok = worst_tv <= 1e-8 && worst_cell <= 1e-9;
    std::cout << (conj_ok ? "PASS" : "FAIL")
              << " conjugacy: max cardinality TV = " << worst_tv
              << ", max intensity error = " << worst_cell << "\n";
    failures += conj_ok ? 0 : 1;

    double worst_conv = 0.0;
    for (int i = 0; i < instances; ++i) {
        const double l1 = rng.uniform01_open() * 5.0;
        const double l2 = rng.uniform01_open() * 5.0;
        const auto conv = convolve(truncated_poisson(l1, 60), truncated_poisson(l2, 60));
        worst_conv =
            std::max(worst_conv, total_variation(conv, truncated_poisson(l1 + l2, 120)));
    }
    const bool conv_ok = worst_conv <= 1e-10;
    std::cout << (conv_ok ? "PASS" : "FAIL")
              << " convolution: max TV = " << worst_conv << "\n";
    failures += conv_ok ? 0 : 1;

    double worst_gap = 0.0;
    for (int i = 0; i < instances; ++i) {
        std::vector<double> masses(21);
        for (auto& x : masses) x = rng.uniform01_open();
        const auto q = CardinalityPmf::normalized(std::move(masses));
        double best_l = 1e-3, best_kld = std::numeric_limits<double>::infinity();
        for (double l = 1e-3; l < 20.0; l += 1e-3) {
            const double kld = kld_cardinality(q, truncated_poisson(l, 200));
            if (kld < best_kld) {
                best_kld = kld;
                best_l = l;
            }
        }
        worst_gap = std::max(worst_gap, std::abs(best_l - q.mean()));
    }
    const bool kld_ok = worst_gap <= 1e-3 + 1e-9;
    std::cout << (kld_ok ? "PASS" : "FAIL")
              << " kld-minimizer: max |argmin - mean| = " << worst_gap << "\n";
    failures += kld_ok ? 0 : 1;

    return failures == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Track-before-detect PHD filtering benchmark harness"};
    app.require_subcommand(1);

    CommonOpts run_opts;
    int jobs = 1;
    bool tune = false;
    auto* run = app.add_subcommand("run", "Run the Monte Carlo experiment (both filters)");
    add_config_opts(run, run_opts);
    run->add_option("--jobs", jobs, "Parallel replication workers")
        ->check(CLI::PositiveNumber);
    run->add_flag("--tune-kappa", tune,
                  "Grid-search the baseline clutter level before running");

    CommonOpts sim_opts;
    int replication = 0;
    auto* sim = app.add_subcommand("simulate", "Dump one replication's frames as CSV");
    add_config_opts(sim, sim_opts);
    sim->add_option("--replication", replication, "Replication index")
        ->check(CLI::NonNegativeNumber);

    std::string results_dir = "results";
    auto* summ = app.add_subcommand("summarize", "Compare filters from results.csv");
    summ->add_option("--results", results_dir, "Directory holding results.csv");

    int instances = 100;
    std::uint64_t oracle_seed = 7;
    auto* oracle = app.add_subcommand("oracle", "Randomized cardinality-toolbox checks");
    oracle->add_option("--instances", instances, "Instances per check")
        ->check(CLI::PositiveNumber);
    oracle->add_option("--seed", oracle_seed, "RNG seed");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run->parsed()) return cmd_run(run_opts, jobs, tune);
        if (sim->parsed()) return cmd_simulate(sim_opts, replication);
        if (summ->parsed()) return cmd_summarize(results_dir);
        if (oracle->parsed()) return cmd_oracle(instances, oracle_seed);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    }
    return 0;
}
