#include "emubench_app/commands.hpp"

#include <fstream>
#include <iomanip>
#include <ostream>
#include <set>
#include <sstream>

#include "emubench/error.hpp"
#include "emubench_app/spec_json.hpp"

namespace emubench::app {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

std::string scalar_text(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    throw ConfigError("expected a scalar value, got " + v.dump());
}

template <typename T>
T as(const json& v, const std::string& key) {
    try {
        return v.get<T>();
    } catch (const json::exception&) {
        throw ConfigError("config: bad value for '" + key + "': " + v.dump());
    }
}

void apply_experiment_json(const json& j, StencilExperimentConfig& e) {
    if (!j.is_object()) throw ConfigError("config: 'experiment' must be an object");
    for (const auto& [key, v] : j.items()) {
        if (key == "gamma1") e.gamma1 = as<double>(v, key);
        else if (key == "N") e.num_points = as<int>(v, key);
        else if (key == "ic-cutoff") e.ic_cutoff = as<int>(v, key);
        else if (key == "train-samples") e.train_samples = as<int>(v, key);
        else if (key == "train-steps") e.train_steps = as<int>(v, key);
        else if (key == "test-samples") e.test_samples = as<int>(v, key);
        else if (key == "test-steps") e.test_steps = as<int>(v, key);
        else if (key == "methodologies") e.methodologies = as<std::vector<std::string>>(v, key);
        else if (key == "correction") e.correction = parse_correction_variant(as<std::string>(v, key));
        else if (key == "coarse-proportion") e.coarse_proportion = as<double>(v, key);
        else if (key == "metrics") e.metrics = as<std::vector<std::string>>(v, key);
        else if (key == "horizon") e.horizon = as<int>(v, key);
        else if (key == "warm-start-after") e.warm_start_after = as<int>(v, key);
        else if (key == "newton-tol") e.newton.tol = as<double>(v, key);
        else if (key == "newton-max-iters") e.newton.max_iters = as<int>(v, key);
        else throw ConfigError("config: unknown experiment key '" + key + "'");
    }
}

void write_json(const fs::path& path, const json& j) {
    std::error_code ec;
    if (path.has_parent_path()) fs::create_directories(path.parent_path(), ec);
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw ConfigError("cannot write " + path.string());
    out << j.dump(2) << "\n";
}

// Maps library errors onto exit codes.
template <typename Fn>
int guarded(std::ostream& err, Fn&& fn) {
    try {
        return fn();
    } catch (const DivergenceError& e) {
        err << "error: " << e.what() << " (sample " << e.sample() << ", last valid step " << e.last_valid_step()
            << ")\n";
        return kExitNumeric;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const ShapeError& e) {
        err << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const NumericError& e) {
        err << "error: " << e.what() << "\n";
        return kExitNumeric;
    }
}

}  // namespace

void apply_config_json(const json& j, RunConfig& c) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    for (const auto& [key, v] : j.items()) {
        if (key == "scenario") c.scenario = as<std::string>(v, key);
        else if (key == "dims") c.dims = as<int>(v, key);
        else if (key == "seed") c.seed = as<std::uint64_t>(v, key);
        else if (key == "out") c.out = as<std::string>(v, key);
        else if (key == "format") c.format = parse_export_format(as<std::string>(v, key));
        else if (key == "threads") c.threads = as<unsigned>(v, key);
        else if (key == "from-sidecar") c.from_sidecar = as<std::string>(v, key);
        else if (key == "train-samples" || key == "train-steps" || key == "test-samples" || key == "test-steps") {
            std::string k = key;
            k[k.find('-')] = '_';
            c.overrides.emplace_back(k, scalar_text(v));
        } else if (key == "type") c.overrides.emplace_back("type", as<std::string>(v, key));
        else if (key == "param") {
            if (v.is_object()) {
                for (const auto& [pk, pv] : v.items()) c.overrides.emplace_back(pk, scalar_text(pv));
            } else {
                for (const auto& item : as<std::vector<std::string>>(v, key)) {
                    const auto eq = item.find('=');
                    if (eq == std::string::npos) throw ConfigError("config: param entries must be key=value: " + item);
                    c.overrides.emplace_back(item.substr(0, eq), item.substr(eq + 1));
                }
            }
        } else if (key == "experiment") apply_experiment_json(v, c.experiment);
        else if (key == "pred") c.pred = as<std::string>(v, key);
        else if (key == "ref") c.ref = as<std::string>(v, key);
        else if (key == "metrics") c.metrics = as<std::vector<std::string>>(v, key);
        else if (key == "horizon") c.horizon = as<int>(v, key);
        else throw ConfigError("config: unknown key '" + key + "'");
    }
}

void load_config_file(const fs::path& path, RunConfig& config) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read config " + path.string());
    json j;
    try {
        j = json::parse(in, nullptr, true, true);
    } catch (const json::exception& e) {
        throw ConfigError("malformed config " + path.string() + ": " + e.what());
    }
    apply_config_json(j, config);
}

int run_generate(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (config.from_sidecar) {
            const json side = read_sidecar(*config.from_sidecar);
            const ScenarioSpec spec = spec_from_json(side.at("spec"));
            const Split split = side.at("split").get<std::string>() == "test" ? Split::test : Split::train;
            const auto paths = write_bundle(config.out, spec, split, side.at("seed").get<std::uint64_t>(),
                                            parse_export_format(side.at("format").get<std::string>()), config.threads);
            out << paths.payload.string() << "\n" << paths.sidecar.string() << "\n";
            return kExitOk;
        }
        if (config.scenario.empty()) throw ConfigError("generate needs --scenario");
        ScenarioSpec spec = resolve_scenario(config.scenario, config.dims);
        for (const auto& [key, value] : config.overrides) apply_override(spec, key, value);
        for (const Split split : {Split::train, Split::test}) {
            const auto paths = write_bundle(config.out, spec, split, config.seed, config.format, config.threads);
            out << paths.payload.string() << "\n" << paths.sidecar.string() << "\n";
        }
        return kExitOk;
    });
}

int run_experiment(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        StencilExperimentConfig e = config.experiment;
        e.seed = config.seed;
        e.threads = config.threads;
        const ExperimentReport report = run_stencil_experiment(e);
        const fs::path path = config.out / "experiment.json";
        write_json(path, experiment_to_json(report));

        const std::string metric = e.metrics.front();
        const auto row = [&](const std::string& label, const std::vector<double>& theta, double dist,
                             const std::map<std::string, RolloutReport>& metrics, const std::string& note) {
            const auto& losses = metrics.at(metric).losses;
            out << std::left << std::setw(10) << label << std::right << std::fixed << std::setprecision(4)
                << std::setw(9) << theta[0] << std::setw(9) << theta[1] << std::setw(9) << dist << std::setw(10)
                << losses.front() << std::setw(10) << (losses.size() >= 10 ? losses[9] : losses.back()) << note
                << "\n";
        };
        out << std::left << std::setw(10) << "method" << std::right << std::setw(9) << "center" << std::setw(9)
            << "right" << std::setw(9) << "dist" << std::setw(10) << "step1" << std::setw(10) << "step10" << "\n";
        row("fou", report.fou_theta, 0.0, report.fou_metrics, "");
        for (const auto& cell : report.cells) {
            row(cell.methodology, cell.theta, cell.distance_to_fou, cell.metrics, cell.ok ? "" : "  failed: " + cell.error);
        }
        out << path.string() << "\n";
        return kExitOk;
    });
}

int run_metrics(const RunConfig& config, std::ostream& out, std::ostream& err) {
    return guarded(err, [&] {
        if (config.pred.empty() || config.ref.empty()) throw ConfigError("metrics needs --pred and --ref");
        const LoadedBundle pred = read_bundle(config.pred);
        const LoadedBundle ref = read_bundle(config.ref);
        const auto& p = pred.data;
        const auto& r = ref.data;
        if (p.samples != r.samples || p.snapshots != r.snapshots || p.channels != r.channels || p.grid != r.grid) {
            throw ShapeError("metrics: prediction and reference bundles have different shapes");
        }
        std::vector<Trajectory> pt;
        std::vector<Trajectory> rt;
        for (int s = 0; s < p.samples; ++s) {
            pt.push_back(p.trajectory(s));
            rt.push_back(r.trajectory(s));
        }
        json metrics = json::object();
        for (const auto& name : config.metrics) {
            metrics[name] = report_to_json(rollout_metrics(pt, rt, metric_by_name(name), config.horizon));
        }
        const json report{{"pred", config.pred.string()},
                          {"ref", config.ref.string()},
                          {"horizon", config.horizon},
                          {"metrics", metrics}};
        const fs::path path = config.out / "metrics.json";
        write_json(path, report);
        out << path.string() << "\n";
        return kExitOk;
    });
}

int run_list(std::ostream& out) {
    for (const auto& d : registry_list()) {
        std::string modes;
        for (const auto m : d.modes) modes += (modes.empty() ? "" : ",") + std::string(mode_prefix(m));
        out << std::left << std::setw(24) << d.canonical_name() << std::setw(8) << d.classes << modes << "\n";
    }
    return kExitOk;
}

}  // namespace emubench::app
