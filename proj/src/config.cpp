#include "tbdphd/config.hpp"

#include <fstream>
#include <initializer_list>
#include <stdexcept>
#include <string>

namespace tbdphd {

namespace {

using nlohmann::json;

[[noreturn]] void fail(const std::string& path, const std::string& msg) {
    throw std::invalid_argument("config error at '" + path + "': " + msg);
}

std::string join(const std::string& path, const std::string& key) {
    return path.empty() ? key : path + "." + key;
}

void check_keys(const json& obj, const std::string& path,
                std::initializer_list<const char*> allowed) {
    for (auto it = obj.begin(); it != obj.end(); ++it) {
        bool known = false;
        for (const char* k : allowed) {
            if (it.key() == k) {
                known = true;
                break;
            }
        }
        if (!known) fail(join(path, it.key()), "unknown key");
    }
}

const json& require(const json& obj, const std::string& path, const char* key) {
    const auto it = obj.find(key);
    if (it == obj.end()) fail(join(path, key), "missing required field");
    return *it;
}

const json& require_object(const json& obj, const std::string& path, const char* key) {
    const json& v = require(obj, path, key);
    if (!v.is_object()) fail(join(path, key), "expected an object");
    return v;
}

double get_number(const json& obj, const std::string& path, const char* key) {
    const json& v = require(obj, path, key);
    if (!v.is_number()) fail(join(path, key), "expected a number");
    return v.get<double>();
}

int get_int(const json& obj, const std::string& path, const char* key) {
    const json& v = require(obj, path, key);
    if (!v.is_number_integer()) fail(join(path, key), "expected an integer");
    return v.get<int>();
}

std::uint64_t get_u64(const json& obj, const std::string& path, const char* key) {
    const json& v = require(obj, path, key);
    if (!(v.is_number_unsigned() || (v.is_number_integer() && v.get<std::int64_t>() >= 0))) {
        fail(join(path, key), "expected a nonnegative integer");
    }
    return v.get<std::uint64_t>();
}

bool get_bool(const json& obj, const std::string& path, const char* key) {
    const json& v = require(obj, path, key);
    if (!v.is_boolean()) fail(join(path, key), "expected a boolean");
    return v.get<bool>();
}

std::string get_string(const json& obj, const std::string& path, const char* key) {
    const json& v = require(obj, path, key);
    if (!v.is_string()) fail(join(path, key), "expected a string");
    return v.get<std::string>();
}

template <typename F>
auto rethrow_at(const std::string& path, F&& f) {
    try {
        return f();
    } catch (const std::invalid_argument& e) {
        std::string what = e.what();
        if (what.rfind("config error", 0) == 0) throw;
        fail(path, what);
    }
}

}  // namespace

ExperimentConfig parse_config(const json& doc) {
    if (!doc.is_object()) fail("", "top level must be an object");
    check_keys(doc, "",
               {"grid", "motion", "amplitude", "scenario", "filter", "baseline",
                "replications", "master_seed", "scan_count", "output_dir"});

    const json& jg = require_object(doc, "", "grid");
    check_keys(jg, "grid",
               {"range_min", "range_max", "range_res", "bearing_min", "bearing_max",
                "bearing_res"});
    GridSpec grid = rethrow_at("grid", [&] {
        return GridSpec(get_number(jg, "grid", "range_min"),
                        get_number(jg, "grid", "range_max"),
                        get_number(jg, "grid", "range_res"),
                        get_number(jg, "grid", "bearing_min"),
                        get_number(jg, "grid", "bearing_max"),
                        get_number(jg, "grid", "bearing_res"));
    });

    const json& jm = require_object(doc, "", "motion");
    check_keys(jm, "motion", {"tau", "q"});
    MotionParams motion{get_number(jm, "motion", "tau"), get_number(jm, "motion", "q")};
    rethrow_at("motion", [&] { return MotionModel(motion.tau, motion.q); });

    const json& ja = require_object(doc, "", "amplitude");
    check_keys(ja, "amplitude", {"sigma_n", "sigma_s"});
    AmplitudeParams amplitude = rethrow_at("amplitude", [&] {
        return AmplitudeParams(get_number(ja, "amplitude", "sigma_n"),
                               get_number(ja, "amplitude", "sigma_s"));
    });

    const json& js = require(doc, "", "scenario");
    if (!js.is_array()) fail("scenario", "expected an array");
    std::vector<ScenarioTarget> scenario;
    for (std::size_t i = 0; i < js.size(); ++i) {
        const std::string path = "scenario[" + std::to_string(i) + "]";
        const json& jt = js[i];
        if (!jt.is_object()) fail(path, "expected an object");
        check_keys(jt, path, {"state", "birth_time", "lasting_time", "birth_weight"});
        const json& st = require(jt, path, "state");
        if (!st.is_array() || st.size() != 4) fail(join(path, "state"), "expected [px, vx, py, vy]");
        for (const auto& x : st) {
            if (!x.is_number()) fail(join(path, "state"), "expected numeric entries");
        }
        ScenarioTarget t;
        t.initial_state = {st[0].get<double>(), st[1].get<double>(), st[2].get<double>(),
                           st[3].get<double>()};
        t.birth_time = get_int(jt, path, "birth_time");
        t.lasting_time = get_int(jt, path, "lasting_time");
        t.birth_weight = get_number(jt, path, "birth_weight");
        scenario.push_back(t);
    }
    rethrow_at("scenario", [&] { validate_scenario(scenario); return 0; });

    const json& jf = require_object(doc, "", "filter");
    check_keys(jf, "filter",
               {"survival_prob", "birth_weight", "particles_per_component",
                "prune_threshold", "merge_threshold", "birth_threshold",
                "birth_velocity_std", "capping_enabled"});
    FilterConfig filter;
    filter.survival_prob = get_number(jf, "filter", "survival_prob");
    filter.birth_weight = get_number(jf, "filter", "birth_weight");
    filter.particles_per_component = get_int(jf, "filter", "particles_per_component");
    filter.prune_threshold = get_number(jf, "filter", "prune_threshold");
    filter.merge_threshold = get_number(jf, "filter", "merge_threshold");
    filter.birth_threshold = get_number(jf, "filter", "birth_threshold");
    filter.birth_velocity_std = get_number(jf, "filter", "birth_velocity_std");
    filter.capping_enabled = get_bool(jf, "filter", "capping_enabled");
    rethrow_at("filter", [&] { validate(filter); return 0; });

    const json& jb = require_object(doc, "", "baseline");
    check_keys(jb, "baseline", {"kappa", "kappa_mode"});
    BkConfig baseline;
    baseline.kappa = get_number(jb, "baseline", "kappa");
    const std::string mode = get_string(jb, "baseline", "kappa_mode");
    if (mode == "constant") {
        baseline.kappa_mode = KappaMode::Constant;
    } else if (mode == "scaled_noise") {
        baseline.kappa_mode = KappaMode::ScaledNoise;
    } else {
        fail("baseline.kappa_mode", "must be 'constant' or 'scaled_noise'");
    }
    rethrow_at("baseline", [&] { validate(baseline); return 0; });

    ExperimentConfig cfg{grid,     motion,   amplitude,
                         scenario, filter,   baseline,
                         get_int(doc, "", "replications"),
                         get_u64(doc, "", "master_seed"),
                         get_int(doc, "", "scan_count"),
                         get_string(doc, "", "output_dir")};
    if (cfg.replications < 1) fail("replications", "must be >= 1");
    if (cfg.scan_count < 1) fail("scan_count", "must be >= 1");
    if (cfg.output_dir.empty()) fail("output_dir", "must not be empty");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw std::invalid_argument("cannot open config file: " + path);
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::invalid_argument("config parse failure in " + path + ": " + e.what());
    }
    return parse_config(doc);
}

nlohmann::json to_json(const ExperimentConfig& cfg) {
    json doc;
    doc["grid"] = {{"range_min", cfg.grid.range_min()},
                   {"range_max", cfg.grid.range_max()},
                   {"range_res", cfg.grid.range_res()},
                   {"bearing_min", cfg.grid.bearing_min()},
                   {"bearing_max", cfg.grid.bearing_max()},
                   {"bearing_res", cfg.grid.bearing_res()}};
    doc["motion"] = {{"tau", cfg.motion.tau}, {"q", cfg.motion.q}};
    doc["amplitude"] = {{"sigma_n", cfg.amplitude.sigma_n},
                        {"sigma_s", cfg.amplitude.sigma_s}};
    doc["scenario"] = json::array();
    for (const auto& t : cfg.scenario) {
        doc["scenario"].push_back(
            {{"state", {t.initial_state.px, t.initial_state.vx, t.initial_state.py,
                        t.initial_state.vy}},
             {"birth_time", t.birth_time},
             {"lasting_time", t.lasting_time},
             {"birth_weight", t.birth_weight}});
    }
    doc["filter"] = {{"survival_prob", cfg.filter.survival_prob},
                     {"birth_weight", cfg.filter.birth_weight},
                     {"particles_per_component", cfg.filter.particles_per_component},
                     {"prune_threshold", cfg.filter.prune_threshold},
                     {"merge_threshold", cfg.filter.merge_threshold},
                     {"birth_threshold", cfg.filter.birth_threshold},
                     {"birth_velocity_std", cfg.filter.birth_velocity_std},
                     {"capping_enabled", cfg.filter.capping_enabled}};
    doc["baseline"] = {{"kappa", cfg.baseline.kappa},
                       {"kappa_mode", cfg.baseline.kappa_mode == KappaMode::Constant
                                          ? "constant"
                                          : "scaled_noise"}};
    doc["replications"] = cfg.replications;
    doc["master_seed"] = cfg.master_seed;
    doc["scan_count"] = cfg.scan_count;
    doc["output_dir"] = cfg.output_dir;
    return doc;
}

ExperimentConfig preset(const std::string& name) {
    bool corrected;
    if (name == "table1_corrected") {
        corrected = true;
    } else if (name == "table1_verbatim") {
        corrected = false;
    } else {
        throw std::invalid_argument("unknown preset '" + name +
                                    "' (available: table1_corrected, table1_verbatim)");
    }
    return ExperimentConfig{GridSpec(0.0, 200.0, 2.5, 0.0, 180.0, 3.0),
                            MotionParams{1.0, 8.1e-3},
                            AmplitudeParams(1.5, 6.0),
                            benchmark_scenario(corrected),
                            FilterConfig{},
                            BkConfig{1.0, KappaMode::Constant},
                            25,
                            20260817ull,
                            49,
                            "results"};
}

std::vector<std::string> preset_names() {
    return {"table1_corrected", "table1_verbatim"};
}

}  // namespace tbdphd
