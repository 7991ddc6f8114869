#include "tbdphd/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "tbdphd/bk_filter.hpp"
#include "tbdphd/scenario.hpp"

namespace tbdphd {

namespace {

// Seed lanes: one stream per (replication, role). Tuning shifts the master
// seed itself so tuning draws never overlap evaluation draws.
constexpr std::uint64_t kSimLane = 0;
constexpr std::uint64_t kTbdLane = 1;
constexpr std::uint64_t kBkLane = 2;
constexpr std::uint64_t kTuneSalt = 0x74756e65ull;  // disjoint master for tuning

std::string fmt(double x) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::vector<Eigen::Vector2d> positions_of(const std::vector<TruthPoint>& truth) {
    std::vector<Eigen::Vector2d> out;
    out.reserve(truth.size());
    for (const auto& t : truth) out.push_back(t.state.position());
    return out;
}

std::vector<Eigen::Vector2d> positions_of(const std::vector<Estimate>& est) {
    std::vector<Eigen::Vector2d> out;
    out.reserve(est.size());
    for (const auto& e : est) out.push_back(e.state.position());
    return out;
}

ReplicationOutput run_replication_impl(const ExperimentConfig& cfg, int replication,
                                       bool run_tbd, bool run_bk) {
    ReplicationOutput out;
    out.replication = replication;
    try {
        const MotionModel model(cfg.motion.tau, cfg.motion.q);
        RngStream sim_rng(derive_seed(cfg.master_seed,
                                      static_cast<std::uint64_t>(replication), kSimLane));
        const Simulation sim = simulate_scenario(cfg.scenario, model, cfg.grid,
                                                 cfg.amplitude, cfg.scan_count, sim_rng);

        struct Lane {
            const char* name;
            std::function<StepResult(const EchoFrame&)> step;
        };
        TbdPhdFilter tbd(cfg.filter, model, cfg.grid, cfg.amplitude,
                         derive_seed(cfg.master_seed,
                                     static_cast<std::uint64_t>(replication), kTbdLane));
        BkPhdFilter bk(cfg.filter, cfg.baseline, model, cfg.grid, cfg.amplitude,
                       derive_seed(cfg.master_seed,
                                   static_cast<std::uint64_t>(replication), kBkLane));
        std::vector<Lane> lanes;
        if (run_tbd) {
            lanes.push_back({kTbdFilterName, [&](const EchoFrame& f) { return tbd.step(f); }});
        }
        if (run_bk) {
            lanes.push_back({kBkFilterName, [&](const EchoFrame& f) { return bk.step(f); }});
        }

        for (const auto& lane : lanes) {
            for (int k = 1; k <= cfg.scan_count; ++k) {
                const EchoFrame& frame = sim.frames[static_cast<std::size_t>(k - 1)];
                const auto truth = sim.truth.at(k);
                const StepResult sr = lane.step(frame);
                const OspaResult o =
                    ospa(positions_of(truth), positions_of(sr.estimates), kScoringOspa);
                out.records.push_back({replication, lane.name, k, o.total, o.loc,
                                       o.card, sr.n_hat, static_cast<int>(truth.size()),
                                       sr.lambda, sr.component_count});
                for (const auto& e : sr.estimates) {
                    out.estimates.push_back({replication, lane.name, k, e.component_id,
                                             e.state});
                }
            }
        }
    } catch (const std::exception& e) {
        out.failed = true;
        out.error = e.what();
        out.records.clear();
        out.estimates.clear();
    }
    return out;
}

std::vector<ReplicationOutput> run_all(const ExperimentConfig& cfg, int jobs,
                                       bool run_tbd, bool run_bk) {
    const int R = cfg.replications;
    std::vector<ReplicationOutput> outputs(static_cast<std::size_t>(R));
    if (jobs <= 1) {
        for (int r = 0; r < R; ++r) {
            outputs[static_cast<std::size_t>(r)] =
                run_replication_impl(cfg, r, run_tbd, run_bk);
        }
        return outputs;
    }
    std::atomic<int> next{0};
    auto worker = [&] {
        for (;;) {
            const int r = next.fetch_add(1);
            if (r >= R) return;
            outputs[static_cast<std::size_t>(r)] =
                run_replication_impl(cfg, r, run_tbd, run_bk);
        }
    };
    std::vector<std::thread> pool;
    const int n = std::min(jobs, R);
    pool.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    return outputs;
}

void write_summary(const std::filesystem::path& path,
                   const std::vector<ScanRecord>& records, int scan_count) {
    // Per filter, per scan: aggregate across the replications present.
    std::ofstream out(path);
    out << "filter,scan,ospa_mean,ospa_std,ospa_loc_mean,ospa_loc_std,"
           "ospa_card_mean,ospa_card_std,n_hat_mean,n_hat_std,n_true_mean\n";
    for (const char* name : {kTbdFilterName, kBkFilterName}) {
        std::map<int, std::vector<const ScanRecord*>> per_rep;
        for (const auto& r : records) {
            if (r.filter == name) per_rep[r.replication].push_back(&r);
        }
        if (per_rep.empty()) continue;
        auto series = [&](auto proj) {
            std::vector<std::vector<double>> runs;
            for (const auto& [rep, rows] : per_rep) {
                std::vector<double> run(static_cast<std::size_t>(scan_count), 0.0);
                for (const ScanRecord* r : rows) {
                    run[static_cast<std::size_t>(r->scan - 1)] = proj(*r);
                }
                runs.push_back(std::move(run));
            }
            return aggregate(runs);
        };
        const SeriesStats so = series([](const ScanRecord& r) { return r.ospa_total; });
        const SeriesStats sl = series([](const ScanRecord& r) { return r.ospa_loc; });
        const SeriesStats sc = series([](const ScanRecord& r) { return r.ospa_card; });
        const SeriesStats sn = series([](const ScanRecord& r) { return r.n_hat; });
        const SeriesStats st =
            series([](const ScanRecord& r) { return static_cast<double>(r.n_true); });
        for (int k = 0; k < scan_count; ++k) {
            const auto ki = static_cast<std::size_t>(k);
            out << name << ',' << (k + 1) << ',' << fmt(so.mean[ki]) << ','
                << fmt(so.stddev[ki]) << ',' << fmt(sl.mean[ki]) << ','
                << fmt(sl.stddev[ki]) << ',' << fmt(sc.mean[ki]) << ','
                << fmt(sc.stddev[ki]) << ',' << fmt(sn.mean[ki]) << ','
                << fmt(sn.stddev[ki]) << ',' << fmt(st.mean[ki]) << '\n';
        }
    }
}

}  // namespace

ReplicationOutput run_replication(const ExperimentConfig& cfg, int replication) {
    return run_replication_impl(cfg, replication, true, true);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg, int jobs) {
    if (jobs < 1) {
        throw std::invalid_argument("jobs must be >= 1");
    }
    const std::filesystem::path dir(cfg.output_dir);
    std::filesystem::create_directories(dir);

    const auto outputs = run_all(cfg, jobs, true, true);

    ExperimentResult result;
    result.results_path = dir / "results.csv";
    result.estimates_path = dir / "estimates.csv";
    result.summary_path = dir / "summary.csv";
    for (const auto& o : outputs) {
        if (o.failed) {
            result.failures.push_back("replication " + std::to_string(o.replication) +
                                      ": " + o.error);
            continue;
        }
        result.records.insert(result.records.end(), o.records.begin(), o.records.end());
        result.estimates.insert(result.estimates.end(), o.estimates.begin(),
                                o.estimates.end());
    }

    std::ofstream rf(result.results_path);
    rf << "replication,filter,scan,ospa_total,ospa_loc,ospa_card,n_hat,n_true,"
          "lambda,component_count\n";
    for (const auto& r : result.records) {
        rf << r.replication << ',' << r.filter << ',' << r.scan << ','
           << fmt(r.ospa_total) << ',' << fmt(r.ospa_loc) << ',' << fmt(r.ospa_card)
           << ',' << fmt(r.n_hat) << ',' << r.n_true << ',' << fmt(r.lambda) << ','
           << r.component_count << '\n';
    }
    rf.close();

    std::ofstream ef(result.estimates_path);
    ef << "replication,filter,scan,component_id,px,vx,py,vy\n";
    for (const auto& e : result.estimates) {
        ef << e.replication << ',' << e.filter << ',' << e.scan << ',' << e.component_id
           << ',' << fmt(e.state.px) << ',' << fmt(e.state.vx) << ',' << fmt(e.state.py)
           << ',' << fmt(e.state.vy) << '\n';
    }
    ef.close();

    write_summary(result.summary_path, result.records, cfg.scan_count);
    return result;
}

namespace {

struct ResultRow {
    int replication;
    std::string filter;
    int scan;
    double ospa_total;
    double n_hat;
    int n_true;
};

std::vector<ResultRow> read_results(const std::filesystem::path& file) {
    std::ifstream in(file);
    if (!in) {
        throw std::runtime_error("cannot open " + file.string());
    }
    std::string line;
    if (!std::getline(in, line)) {
        throw std::runtime_error("empty results file " + file.string());
    }
    std::vector<ResultRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> f;
        std::stringstream ss(line);
        std::string field;
        while (std::getline(ss, field, ',')) f.push_back(field);
        if (f.size() != 10) {
            throw std::runtime_error("malformed results row: " + line);
        }
        rows.push_back({std::stoi(f[0]), f[1], std::stoi(f[2]), std::stod(f[3]),
                        std::stod(f[6]), std::stoi(f[7])});
    }
    return rows;
}

}  // namespace

std::vector<ComparisonRow> compare_summary(const std::filesystem::path& results_dir) {
    const auto rows = read_results(results_dir / "results.csv");

    // scan -> (sum ospa, sum |n_hat - n_true|, count), per filter.
    struct Acc {
        double ospa = 0.0;
        double card_err = 0.0;
        int count = 0;
    };
    std::map<int, Acc> tbd, bk;
    for (const auto& r : rows) {
        auto* acc = r.filter == kTbdFilterName ? &tbd
                    : r.filter == kBkFilterName ? &bk
                                                : nullptr;
        if (acc == nullptr) continue;
        auto& slot = (*acc)[r.scan];
        slot.ospa += r.ospa_total;
        slot.card_err += std::abs(r.n_hat - r.n_true);
        ++slot.count;
    }
    for (const char* name : {kTbdFilterName, kBkFilterName}) {
        const auto& acc = std::string(name) == kTbdFilterName ? tbd : bk;
        if (acc.empty()) {
            throw std::runtime_error("results are missing filter tag '" +
                                     std::string(name) + "'");
        }
    }
    if (tbd.size() != bk.size()) {
        throw std::runtime_error("filters disagree on scan count");
    }

    std::vector<ComparisonRow> table;
    ComparisonRow overall;
    double tn = 0.0, bn = 0.0;
    for (const auto& [scan, t] : tbd) {
        const auto it = bk.find(scan);
        if (it == bk.end()) {
            throw std::runtime_error("filters disagree on scan set at scan " +
                                     std::to_string(scan));
        }
        const auto& b = it->second;
        ComparisonRow row;
        row.scan = scan;
        row.tbd_ospa_mean = t.ospa / t.count;
        row.bk_ospa_mean = b.ospa / b.count;
        row.ospa_diff = row.tbd_ospa_mean - row.bk_ospa_mean;
        row.tbd_card_err_mean = t.card_err / t.count;
        row.bk_card_err_mean = b.card_err / b.count;
        table.push_back(row);
        overall.tbd_ospa_mean += t.ospa;
        overall.bk_ospa_mean += b.ospa;
        overall.tbd_card_err_mean += t.card_err;
        overall.bk_card_err_mean += b.card_err;
        tn += t.count;
        bn += b.count;
    }
    overall.scan = 0;
    overall.tbd_ospa_mean /= tn;
    overall.bk_ospa_mean /= bn;
    overall.tbd_card_err_mean /= tn;
    overall.bk_card_err_mean /= bn;
    overall.ospa_diff = overall.tbd_ospa_mean - overall.bk_ospa_mean;
    table.push_back(overall);

    std::ofstream out(results_dir / "comparison.csv");
    out << "scan,tbd_ospa_mean,bk_ospa_mean,ospa_diff,tbd_card_err_mean,"
           "bk_card_err_mean\n";
    for (const auto& row : table) {
        if (row.scan == 0) {
            out << "overall";
        } else {
            out << row.scan;
        }
        out << ',' << fmt(row.tbd_ospa_mean) << ',' << fmt(row.bk_ospa_mean) << ','
            << fmt(row.ospa_diff) << ',' << fmt(row.tbd_card_err_mean) << ','
            << fmt(row.bk_card_err_mean) << '\n';
    }
    return table;
}

std::vector<double> default_kappa_grid() {
    std::vector<double> grid;
    for (int e = -12; e <= 10; ++e) {
        grid.push_back(std::pow(10.0, e / 4.0));
    }
    return grid;
}

double tune_kappa(const ExperimentConfig& cfg, const std::vector<double>& grid_values,
                  int tuning_replications) {
    if (grid_values.empty()) {
        throw std::invalid_argument("kappa grid must not be empty");
    }
    if (tuning_replications < 1) {
        throw std::invalid_argument("tuning_replications must be >= 1");
    }
    ExperimentConfig tune_cfg = cfg;
    tune_cfg.master_seed = derive_seed(cfg.master_seed, kTuneSalt, 0);
    tune_cfg.replications = tuning_replications;

    double best_kappa = grid_values.front();
    double best_score = std::numeric_limits<double>::infinity();
    for (const double kappa : grid_values) {
        tune_cfg.baseline.kappa = kappa;
        double sum = 0.0;
        int count = 0;
        for (int r = 0; r < tuning_replications; ++r) {
            const auto out = run_replication_impl(tune_cfg, r, false, true);
            if (out.failed) continue;
            for (const auto& rec : out.records) {
                sum += rec.ospa_total;
                ++count;
            }
        }
        const double score =
            count > 0 ? sum / count : std::numeric_limits<double>::infinity();
        if (score < best_score) {
            best_score = score;
            best_kappa = kappa;
        }
    }
    return best_kappa;
}

void dump_frames(const ExperimentConfig& cfg, int replication,
                 const std::filesystem::path& out_dir) {
    std::filesystem::create_directories(out_dir);
    const MotionModel model(cfg.motion.tau, cfg.motion.q);
    RngStream sim_rng(derive_seed(cfg.master_seed,
                                  static_cast<std::uint64_t>(replication), kSimLane));
    const Simulation sim = simulate_scenario(cfg.scenario, model, cfg.grid,
                                             cfg.amplitude, cfg.scan_count, sim_rng);

    for (int k = 1; k <= cfg.scan_count; ++k) {
        char name[32];
        std::snprintf(name, sizeof name, "scan_%04d.csv", k);
        std::ofstream out(out_dir / name);
        const auto& frame = sim.frames[static_cast<std::size_t>(k - 1)];
        for (int i = 0; i < cfg.grid.num_range_bins(); ++i) {
            for (int j = 0; j < cfg.grid.num_bearing_bins(); ++j) {
                if (j > 0) out << ',';
                out << fmt(frame.at(cfg.grid, {i, j}));
            }
            out << '\n';
        }
    }

    std::ofstream truth(out_dir / "truth.csv");
    truth << "scan,target_id,px,vx,py,vy\n";
    for (int k = 1; k <= cfg.scan_count; ++k) {
        for (const auto& tp : sim.truth.at(k)) {
            truth << k << ',' << tp.target_id << ',' << fmt(tp.state.px) << ','
                  << fmt(tp.state.vx) << ',' << fmt(tp.state.py) << ','
                  << fmt(tp.state.vy) << '\n';
        }
    }
}

}  // namespace tbdphd
