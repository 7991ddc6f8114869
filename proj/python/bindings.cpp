#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include "tbdphd/bk_filter.hpp"
#include "tbdphd/config.hpp"
#include "tbdphd/experiment.hpp"
#include "tbdphd/poisson.hpp"

namespace py = pybind11;
using namespace tbdphd;

namespace {

std::vector<Eigen::Vector2d> to_positions(const std::vector<std::pair<double, double>>& xy) {
    std::vector<Eigen::Vector2d> out;
    out.reserve(xy.size());
    for (const auto& [x, y] : xy) out.emplace_back(x, y);
    return out;
}

}  // namespace

PYBIND11_MODULE(_core, m) {
    m.doc() = "Track-before-detect PHD filtering core";
    m.attr("__version__") = "0.1.0";

    py::class_<StateVector>(m, "StateVector")
        .def(py::init<>())
        .def(py::init([](double px, double vx, double py_, double vy) {
                 return StateVector{px, vx, py_, vy};
             }),
             py::arg("px"), py::arg("vx"), py::arg("py"), py::arg("vy"))
        .def_readwrite("px", &StateVector::px)
        .def_readwrite("vx", &StateVector::vx)
        .def_readwrite("py", &StateVector::py)
        .def_readwrite("vy", &StateVector::vy)
        .def("__repr__", [](const StateVector& s) {
            return "StateVector(px=" + std::to_string(s.px) + ", vx=" + std::to_string(s.vx) +
                   ", py=" + std::to_string(s.py) + ", vy=" + std::to_string(s.vy) + ")";
        });

    py::class_<PixelIndex>(m, "PixelIndex")
        .def(py::init<>())
        .def(py::init([](int r, int b) { return PixelIndex{r, b}; }), py::arg("range_bin"),
             py::arg("bearing_bin"))
        .def_readwrite("range_bin", &PixelIndex::range_bin)
        .def_readwrite("bearing_bin", &PixelIndex::bearing_bin)
        .def("__eq__", [](const PixelIndex& a, const PixelIndex& b) { return a == b; })
        .def("__repr__", [](const PixelIndex& p) {
            return "PixelIndex(" + std::to_string(p.range_bin) + ", " +
                   std::to_string(p.bearing_bin) + ")";
        });

    py::class_<GridSpec>(m, "GridSpec")
        .def(py::init<double, double, double, double, double, double>(),
             py::arg("range_min"), py::arg("range_max"), py::arg("range_res"),
             py::arg("bearing_min"), py::arg("bearing_max"), py::arg("bearing_res"))
        .def_property_readonly("num_range_bins", &GridSpec::num_range_bins)
        .def_property_readonly("num_bearing_bins", &GridSpec::num_bearing_bins)
        .def("contains", &GridSpec::contains, py::arg("range"), py::arg("bearing"))
        .def("flat_index", &GridSpec::flat_index)
        .def("from_flat", &GridSpec::from_flat);

    m.def("pixel_count", &pixel_count);
    m.def("pixel_of", &pixel_of, py::arg("state"), py::arg("grid"));
    m.def("illuminated_pixels", &illuminated_pixels, py::arg("state"), py::arg("grid"));
    m.def("cell_center", [](PixelIndex p, const GridSpec& g) {
        const RangeBearing rb = cell_center(p, g);
        return std::make_pair(rb.range, rb.bearing);
    });

    py::class_<AmplitudeParams>(m, "AmplitudeParams")
        .def(py::init<double, double>(), py::arg("sigma_n"), py::arg("sigma_s"))
        .def_readonly("sigma_n", &AmplitudeParams::sigma_n)
        .def_readonly("sigma_s", &AmplitudeParams::sigma_s);

    m.def("noise_pdf", &noise_pdf, py::arg("a"), py::arg("params"));
    m.def("signal_pdf", &signal_pdf, py::arg("a"), py::arg("params"));
    m.def("pixel_lr", &pixel_lr, py::arg("a"), py::arg("params"));
    m.def("log_pixel_lr", &log_pixel_lr, py::arg("a"), py::arg("params"));
    m.def("snr_db", &snr_db, py::arg("params"));
    m.def("target_lr", &target_lr);
    m.def("log_target_lr", &log_target_lr);

    py::class_<EchoFrame>(m, "EchoFrame")
        .def(py::init<>())
        .def_readwrite("scan_index", &EchoFrame::scan_index)
        .def_readwrite("amplitudes", &EchoFrame::amplitudes)
        .def("at", &EchoFrame::at);

    py::class_<MotionModel>(m, "MotionModel")
        .def(py::init<double, double>(), py::arg("tau"), py::arg("q"))
        .def_property_readonly("tau", &MotionModel::tau)
        .def_property_readonly("q", &MotionModel::q)
        .def("propagate_mean", &MotionModel::propagate_mean);

    py::class_<ScenarioTarget>(m, "ScenarioTarget")
        .def(py::init<>())
        .def_readwrite("initial_state", &ScenarioTarget::initial_state)
        .def_readwrite("birth_time", &ScenarioTarget::birth_time)
        .def_readwrite("lasting_time", &ScenarioTarget::lasting_time)
        .def_readwrite("birth_weight", &ScenarioTarget::birth_weight)
        .def("alive_at", &ScenarioTarget::alive_at);

    m.def("benchmark_scenario", &benchmark_scenario, py::arg("corrected") = true);

    py::class_<TruthPoint>(m, "TruthPoint")
        .def_readonly("target_id", &TruthPoint::target_id)
        .def_readonly("state", &TruthPoint::state);

    py::class_<TruthTable>(m, "TruthTable")
        .def_property_readonly("scan_count", &TruthTable::scan_count)
        .def("alive_count", &TruthTable::alive_count)
        .def("at", &TruthTable::at);

    py::class_<Simulation>(m, "Simulation")
        .def_readonly("truth", &Simulation::truth)
        .def_readonly("frames", &Simulation::frames)
        .def_readonly("collisions", &Simulation::collisions);

    m.def(
        "simulate",
        [](const std::vector<ScenarioTarget>& targets, const MotionModel& model,
           const GridSpec& grid, const AmplitudeParams& amp, int scan_count,
           std::uint64_t seed) {
            RngStream rng(seed);
            return simulate_scenario(targets, model, grid, amp, scan_count, rng);
        },
        py::arg("targets"), py::arg("model"), py::arg("grid"), py::arg("params"),
        py::arg("scan_count"), py::arg("seed"));

    py::class_<FilterConfig>(m, "FilterConfig")
        .def(py::init<>())
        .def_readwrite("survival_prob", &FilterConfig::survival_prob)
        .def_readwrite("birth_weight", &FilterConfig::birth_weight)
        .def_readwrite("particles_per_component", &FilterConfig::particles_per_component)
        .def_readwrite("prune_threshold", &FilterConfig::prune_threshold)
        .def_readwrite("merge_threshold", &FilterConfig::merge_threshold)
        .def_readwrite("birth_threshold", &FilterConfig::birth_threshold)
        .def_readwrite("birth_velocity_std", &FilterConfig::birth_velocity_std)
        .def_readwrite("capping_enabled", &FilterConfig::capping_enabled);

    py::enum_<KappaMode>(m, "KappaMode")
        .value("Constant", KappaMode::Constant)
        .value("ScaledNoise", KappaMode::ScaledNoise);

    py::class_<BkConfig>(m, "BkConfig")
        .def(py::init<>())
        .def_readwrite("kappa", &BkConfig::kappa)
        .def_readwrite("kappa_mode", &BkConfig::kappa_mode);

    py::class_<Estimate>(m, "Estimate")
        .def_readonly("component_id", &Estimate::component_id)
        .def_readonly("state", &Estimate::state);

    py::class_<StepDiagnostics>(m, "StepDiagnostics")
        .def_readonly("births", &StepDiagnostics::births)
        .def_readonly("pruned", &StepDiagnostics::pruned)
        .def_readonly("merged", &StepDiagnostics::merged)
        .def_readonly("post_update_components", &StepDiagnostics::post_update_components)
        .def_readonly("post_update_total_mass", &StepDiagnostics::post_update_total_mass)
        .def_readonly("post_update_max_component_mass",
                      &StepDiagnostics::post_update_max_component_mass)
        .def_readonly("overflow_saturations", &StepDiagnostics::overflow_saturations)
        .def_readonly("capped_overflow_components",
                      &StepDiagnostics::capped_overflow_components)
        .def_readonly("skipped_summands", &StepDiagnostics::skipped_summands);

    py::class_<StepResult>(m, "StepResult")
        .def_readonly("scan_index", &StepResult::scan_index)
        .def_readonly("estimates", &StepResult::estimates)
        .def_readonly("n_hat", &StepResult::n_hat)
        .def_readonly("lambda_", &StepResult::lambda)
        .def_readonly("component_count", &StepResult::component_count)
        .def_readonly("diagnostics", &StepResult::diagnostics);

    py::class_<TbdPhdFilter>(m, "TbdPhdFilter")
        .def(py::init<FilterConfig, MotionModel, GridSpec, AmplitudeParams,
                      std::uint64_t>(),
             py::arg("config"), py::arg("model"), py::arg("grid"), py::arg("params"),
             py::arg("seed"))
        .def("step", &TbdPhdFilter::step, py::arg("frame"));

    py::class_<BkPhdFilter>(m, "BkPhdFilter")
        .def(py::init<FilterConfig, BkConfig, MotionModel, GridSpec, AmplitudeParams,
                      std::uint64_t>(),
             py::arg("config"), py::arg("baseline"), py::arg("model"), py::arg("grid"),
             py::arg("params"), py::arg("seed"))
        .def("step", &BkPhdFilter::step, py::arg("frame"));

    py::class_<OspaParams>(m, "OspaParams")
        .def(py::init<double, double>(), py::arg("cutoff"), py::arg("order"))
        .def_readonly("cutoff", &OspaParams::cutoff)
        .def_readonly("order", &OspaParams::order);

    py::class_<OspaResult>(m, "OspaResult")
        .def_readonly("total", &OspaResult::total)
        .def_readonly("loc", &OspaResult::loc)
        .def_readonly("card", &OspaResult::card)
        .def("__repr__", [](const OspaResult& r) {
            return "OspaResult(total=" + std::to_string(r.total) +
                   ", loc=" + std::to_string(r.loc) + ", card=" + std::to_string(r.card) +
                   ")";
        });

    m.def(
        "ospa",
        [](const std::vector<std::pair<double, double>>& truth,
           const std::vector<std::pair<double, double>>& estimates,
           const OspaParams& params) {
            return ospa(to_positions(truth), to_positions(estimates), params);
        },
        py::arg("truth"), py::arg("estimates"), py::arg("params"));

    py::class_<CardinalityPmf>(m, "CardinalityPmf")
        .def(py::init<std::vector<double>>())
        .def_static("normalized", &CardinalityPmf::normalized)
        .def_property_readonly("n_max", &CardinalityPmf::n_max)
        .def("at", &CardinalityPmf::at)
        .def("mean", &CardinalityPmf::mean)
        .def_readonly("p", &CardinalityPmf::p);

    m.def("truncated_poisson", &truncated_poisson, py::arg("lam"), py::arg("n_max"));
    m.def("poisson_tail", &poisson_tail, py::arg("lam"), py::arg("n_max"));
    m.def("best_poisson_rate",
          [](const CardinalityPmf& pmf) { return best_poisson(pmf).rate; });
    m.def("kld_cardinality", &kld_cardinality, py::arg("q"), py::arg("pi"));
    m.def("convolve", &convolve);
    m.def("total_variation", &total_variation);

    py::class_<DiscreteIntensity>(m, "DiscreteIntensity")
        .def(py::init([](std::vector<double> v) { return DiscreteIntensity{std::move(v)}; }))
        .def_readwrite("v", &DiscreteIntensity::v)
        .def("total", &DiscreteIntensity::total);

    py::class_<ExactPosterior>(m, "ExactPosterior")
        .def_readonly("intensity", &ExactPosterior::intensity)
        .def_readonly("cardinality", &ExactPosterior::cardinality);

    m.def("exact_posterior", &exact_posterior, py::arg("prior"), py::arg("lr"),
          py::arg("n_max"));

    py::class_<MotionParams>(m, "MotionParams")
        .def_readwrite("tau", &MotionParams::tau)
        .def_readwrite("q", &MotionParams::q);

    py::class_<ExperimentConfig>(m, "ExperimentConfig")
        .def_readwrite("motion", &ExperimentConfig::motion)
        .def_readwrite("amplitude", &ExperimentConfig::amplitude)
        .def_readwrite("scenario", &ExperimentConfig::scenario)
        .def_readwrite("filter", &ExperimentConfig::filter)
        .def_readwrite("baseline", &ExperimentConfig::baseline)
        .def_readwrite("replications", &ExperimentConfig::replications)
        .def_readwrite("master_seed", &ExperimentConfig::master_seed)
        .def_readwrite("scan_count", &ExperimentConfig::scan_count)
        .def_readwrite("output_dir", &ExperimentConfig::output_dir)
        .def_property_readonly("grid",
                               [](const ExperimentConfig& c) { return c.grid; });

    m.def("preset", &preset, py::arg("name"));
    m.def("preset_names", &preset_names);
    m.def("load_config", &load_config, py::arg("path"));

    m.def("run_experiment", &run_experiment, py::arg("config"), py::arg("jobs") = 1,
          py::call_guard<py::gil_scoped_release>());
    m.def("tune_kappa", &tune_kappa, py::arg("config"), py::arg("grid_values"),
          py::arg("tuning_replications"), py::call_guard<py::gil_scoped_release>());
    m.def("default_kappa_grid", &default_kappa_grid);

    py::class_<ScanRecord>(m, "ScanRecord")
        .def_readonly("replication", &ScanRecord::replication)
        .def_readonly("filter", &ScanRecord::filter)
        .def_readonly("scan", &ScanRecord::scan)
        .def_readonly("ospa_total", &ScanRecord::ospa_total)
        .def_readonly("ospa_loc", &ScanRecord::ospa_loc)
        .def_readonly("ospa_card", &ScanRecord::ospa_card)
        .def_readonly("n_hat", &ScanRecord::n_hat)
        .def_readonly("n_true", &ScanRecord::n_true)
        .def_readonly("lambda_", &ScanRecord::lambda)
        .def_readonly("component_count", &ScanRecord::component_count);

    py::class_<ExperimentResult>(m, "ExperimentResult")
        .def_readonly("records", &ExperimentResult::records)
        .def_readonly("failures", &ExperimentResult::failures)
        .def_property_readonly("results_path",
                               [](const ExperimentResult& r) {
                                   return r.results_path.string();
                               })
        .def_property_readonly("summary_path", [](const ExperimentResult& r) {
            return r.summary_path.string();
        });
}
