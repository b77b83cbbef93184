#include "emubench_app/spec_json.hpp"

#include <set>
#include <string>

#include "emubench/error.hpp"

namespace emubench::app {

using nlohmann::json;

namespace {

void require_keys(const json& j, const std::set<std::string>& keys, const char* where) {
    if (!j.is_object()) throw ConfigError(std::string(where) + ": expected an object");
    for (const auto& [key, value] : j.items()) {
        if (!keys.contains(key)) throw ConfigError(std::string(where) + ": unknown key '" + key + "'");
    }
    for (const auto& key : keys) {
        if (!j.contains(key)) throw ConfigError(std::string(where) + ": missing key '" + key + "'");
    }
}

template <typename T>
T get(const json& j, const char* key) {
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ConfigError(std::string("spec: bad value for '") + key + "': " + e.what());
    }
}

}  // namespace

json spec_to_json(const ScenarioSpec& spec) {
    json params = json::object();
    for (const auto& [k, v] : spec.params) params[k] = v;
    return json{
        {"dynamic", spec.dynamic},
        {"mode", std::string(mode_prefix(spec.mode))},
        {"num_dims", spec.num_dims},
        {"num_points", spec.num_points},
        {"params", params},
        {"gs_type", spec.gs_type},
        {"conservative", spec.conservative},
        {"order", spec.order},
        {"substeps", spec.substeps},
        {"warmup", spec.warmup},
        {"contour", {{"radius", spec.contour.radius}, {"points", spec.contour.points}}},
        {"dealias", {spec.dealias.numerator, spec.dealias.denominator}},
        {"ic",
         {{"cutoff", spec.ic.cutoff},
          {"offset_min", spec.ic.offset_min},
          {"offset_max", spec.ic.offset_max},
          {"normalize_max_abs", spec.ic.normalize_max_abs},
          {"blob_sigma", spec.ic.blob_sigma},
          {"blob_jitter", spec.ic.blob_jitter}}},
        {"recipe",
         {{"train_samples", spec.recipe.train_samples},
          {"train_steps", spec.recipe.train_steps},
          {"test_samples", spec.recipe.test_samples},
          {"test_steps", spec.recipe.test_steps}}},
    };
}

ScenarioSpec spec_from_json(const json& j) {
    require_keys(j,
                 {"dynamic", "mode", "num_dims", "num_points", "params", "gs_type", "conservative", "order", "substeps",
                  "warmup", "contour", "dealias", "ic", "recipe"},
                 "spec");
    const auto mode = get<std::string>(j, "mode");
    const auto dynamic = get<std::string>(j, "dynamic");
    ScenarioSpec spec = resolve_scenario(mode + "_" + dynamic, get<int>(j, "num_dims"));
    spec.num_points = get<int>(j, "num_points");

    const json& params = j.at("params");
    if (!params.is_object() || params.size() != spec.params.size()) {
        throw ConfigError("spec: parameter set does not match scenario " + spec.canonical_name());
    }
    for (const auto& [key, value] : params.items()) {
        const auto it = spec.params.find(key);
        if (it == spec.params.end()) throw ConfigError("spec: unknown parameter '" + key + "'");
        if (!value.is_number()) throw ConfigError("spec: parameter '" + key + "' must be a number");
        it->second = value.get<double>();
    }
    spec.gs_type = get<std::string>(j, "gs_type");
    spec.conservative = get<bool>(j, "conservative");
    spec.order = get<int>(j, "order");
    spec.substeps = get<int>(j, "substeps");
    spec.warmup = get<int>(j, "warmup");

    const json& contour = j.at("contour");
    require_keys(contour, {"radius", "points"}, "spec.contour");
    spec.contour.radius = get<double>(contour, "radius");
    spec.contour.points = get<int>(contour, "points");

    const json& dealias = j.at("dealias");
    if (!dealias.is_array() || dealias.size() != 2) throw ConfigError("spec: dealias must be [numerator, denominator]");
    spec.dealias = {dealias[0].get<int>(), dealias[1].get<int>()};

    const json& ic = j.at("ic");
    require_keys(ic, {"cutoff", "offset_min", "offset_max", "normalize_max_abs", "blob_sigma", "blob_jitter"},
                 "spec.ic");
    spec.ic.cutoff = get<int>(ic, "cutoff");
    spec.ic.offset_min = get<double>(ic, "offset_min");
    spec.ic.offset_max = get<double>(ic, "offset_max");
    spec.ic.normalize_max_abs = get<bool>(ic, "normalize_max_abs");
    spec.ic.blob_sigma = get<double>(ic, "blob_sigma");
    spec.ic.blob_jitter = get<double>(ic, "blob_jitter");

    const json& recipe = j.at("recipe");
    require_keys(recipe, {"train_samples", "train_steps", "test_samples", "test_steps"}, "spec.recipe");
    spec.recipe.train_samples = get<int>(recipe, "train_samples");
    spec.recipe.train_steps = get<int>(recipe, "train_steps");
    spec.recipe.test_samples = get<int>(recipe, "test_samples");
    spec.recipe.test_steps = get<int>(recipe, "test_steps");
    return spec;
}

json report_to_json(const RolloutReport& report) {
    return json{{"per_step", report.losses},
                {"aggregate", report.aggregate},
                {"degenerate", report.degenerate},
                {"horizon", report.horizon}};
}

json experiment_to_json(const ExperimentReport& report) {
    const auto& c = report.config;
    json metrics_fou = json::object();
    for (const auto& [name, r] : report.fou_metrics) metrics_fou[name] = report_to_json(r);
    json cells = json::array();
    for (const auto& cell : report.cells) {
        json m = json::object();
        for (const auto& [name, r] : cell.metrics) m[name] = report_to_json(r);
        json entry{{"methodology", cell.methodology},
                   {"T", cell.T},
                   {"B", cell.B},
                   {"ok", cell.ok},
                   {"theta", cell.theta},
                   {"objective", cell.objective},
                   {"iterations", cell.iterations},
                   {"distance_to_fou", cell.distance_to_fou},
                   {"metrics", m}};
        if (!cell.ok) entry["error"] = cell.error;
        cells.push_back(std::move(entry));
    }
    return json{
        {"scenario", report.scenario},
        {"config",
         {{"gamma1", c.gamma1},
          {"N", c.num_points},
          {"ic_cutoff", c.ic_cutoff},
          {"train_samples", c.train_samples},
          {"train_steps", c.train_steps},
          {"test_samples", c.test_samples},
          {"test_steps", c.test_steps},
          {"seed", c.seed},
          {"methodologies", c.methodologies},
          {"correction", std::string(correction_variant_name(c.correction))},
          {"coarse_proportion", c.coarse_proportion},
          {"metrics", c.metrics},
          {"horizon", c.horizon},
          {"warm_start_after", c.warm_start_after},
          {"newton_tol", c.newton.tol},
          {"newton_max_iters", c.newton.max_iters}}},
        {"fou", {{"theta", report.fou_theta}, {"metrics", metrics_fou}}},
        {"cells", cells},
    };
}

}  // namespace emubench::app
