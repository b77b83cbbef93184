// emubench: generate datasets, run the stencil experiment, score rollouts.

#include <CLI11.hpp>

#include <iostream>
#include <string>
#include <vector>

#include "emubench/error.hpp"
#include "emubench_app/commands.hpp"

namespace {

using emubench::app::RunConfig;

struct Flags {
    std::string config_file;
    std::string scenario;
    int dims = 1;
    std::uint64_t seed = 0;
    std::string out;
    std::string format;
    int train_samples = 0;
    int train_steps = 0;
    int test_samples = 0;
    int test_steps = 0;
    std::vector<std::string> params;
    std::string type;
    unsigned threads = 0;
    std::string from_sidecar;
    std::vector<std::string> methodologies;
    double gamma1 = 0.0;
    std::string correction;
    double coarse_proportion = 0.0;
    std::vector<std::string> metrics;
    int horizon = 0;
    std::string pred;
    std::string ref;
};

void add_common(CLI::App* cmd, Flags& f) {
    cmd->add_option("--config", f.config_file, "JSON config whose keys mirror the long flags");
    cmd->add_option("--seed", f.seed, "Base seed");
    cmd->add_option("--out", f.out, "Output directory");
    cmd->add_option("--threads", f.threads, "Worker threads (0 = all cores)");
}

void add_sizes(CLI::App* cmd, Flags& f) {
    cmd->add_option("--train-samples", f.train_samples)->check(CLI::PositiveNumber);
    cmd->add_option("--train-steps", f.train_steps)->check(CLI::PositiveNumber);
    cmd->add_option("--test-samples", f.test_samples)->check(CLI::PositiveNumber);
    cmd->add_option("--test-steps", f.test_steps)->check(CLI::PositiveNumber);
}

// Flags given on the command line win over the config file.
RunConfig build_config(const CLI::App* cmd, const Flags& f) {
    RunConfig c;
    if (!f.config_file.empty()) emubench::app::load_config_file(f.config_file, c);
    const auto given = [&](const char* name) { return cmd->get_option_no_throw(name) != nullptr && cmd->count(name) > 0; };
    if (given("--scenario")) c.scenario = f.scenario;
    if (given("--dims")) c.dims = f.dims;
    if (given("--seed")) c.seed = f.seed;
    if (given("--out")) c.out = f.out;
    if (given("--format")) c.format = emubench::app::parse_export_format(f.format);
    if (given("--threads")) c.threads = f.threads;
    if (given("--from-sidecar")) c.from_sidecar = f.from_sidecar;
    // The experiment owns its dataset sizes; generate routes them through
    // the scenario overrides.
    struct Size {
        const char* flag;
        const char* key;
        int value;
        int* experiment_field;
    };
    auto& e = c.experiment;
    const Size sizes[] = {{"--train-samples", "train_samples", f.train_samples, &e.train_samples},
                          {"--train-steps", "train_steps", f.train_steps, &e.train_steps},
                          {"--test-samples", "test_samples", f.test_samples, &e.test_samples},
                          {"--test-steps", "test_steps", f.test_steps, &e.test_steps}};
    for (const auto& s : sizes) {
        if (!given(s.flag)) continue;
        if (cmd->get_name() == "experiment") {
            *s.experiment_field = s.value;
        } else {
            c.overrides.emplace_back(s.key, std::to_string(s.value));
        }
    }
    if (given("--type")) c.overrides.emplace_back("type", f.type);
    for (const auto& p : f.params) {
        const auto eq = p.find('=');
        if (eq == std::string::npos) throw emubench::ConfigError("--param expects key=value, got " + p);
        c.overrides.emplace_back(p.substr(0, eq), p.substr(eq + 1));
    }
    if (given("--methodology")) c.experiment.methodologies = f.methodologies;
    if (given("--gamma1")) c.experiment.gamma1 = f.gamma1;
    if (given("--correction")) c.experiment.correction = emubench::parse_correction_variant(f.correction);
    if (given("--coarse-proportion")) c.experiment.coarse_proportion = f.coarse_proportion;
    if (given("--metric")) {
        c.metrics = f.metrics;
        c.experiment.metrics = f.metrics;
    }
    if (given("--horizon")) {
        c.horizon = f.horizon;
        c.experiment.horizon = f.horizon;
    }
    if (given("--pred")) c.pred = f.pred;
    if (given("--ref")) c.ref = f.ref;
    return c;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Pseudo-spectral PDE trajectories, metrics and stencil emulation experiments"};
    app.require_subcommand(1);
    Flags f;

    auto* generate = app.add_subcommand("generate", "Generate train and test bundles for a scenario");
    add_common(generate, f);
    generate->add_option("--scenario", f.scenario, "Scenario id, e.g. diff_burgers or 2d_phy_gs_type");
    generate->add_option("--dims", f.dims, "Spatial dimensions")->check(CLI::Range(1, 3));
    generate->add_option("--format", f.format, "raw64 or csv (1D only)");
    add_sizes(generate, f);
    generate->add_option("--param", f.params, "Scenario override key=value (repeatable)");
    generate->add_option("--type", f.type, "Gray-Scott type for gs_type");
    generate->add_option("--from-sidecar", f.from_sidecar, "Regenerate the split described by a sidecar");

    auto* experiment = app.add_subcommand("experiment", "Train the two-tap stencil on 1D advection");
    add_common(experiment, f);
    add_sizes(experiment, f);
    experiment->add_option("--methodology", f.methodologies, "one, sup;T or div;T (repeatable)");
    experiment->add_option("--gamma1", f.gamma1, "Advection difficulty");
    experiment->add_option("--correction", f.correction, "none, sequential or parallel");
    experiment->add_option("--coarse-proportion", f.coarse_proportion, "Coarse solver share of the difficulty");
    experiment->add_option("--metric", f.metrics, "Metric name (repeatable)");
    experiment->add_option("--horizon", f.horizon, "Geometric-mean horizon")->check(CLI::PositiveNumber);

    auto* metrics = app.add_subcommand("metrics", "Score a predicted bundle against a reference bundle");
    add_common(metrics, f);
    metrics->add_option("--pred", f.pred, "Prediction sidecar or payload");
    metrics->add_option("--ref", f.ref, "Reference sidecar or payload");
    metrics->add_option("--metric", f.metrics, "Metric name (repeatable)");
    metrics->add_option("--horizon", f.horizon, "Geometric-mean horizon")->check(CLI::PositiveNumber);

    auto* list = app.add_subcommand("list", "Print the scenario registry");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : emubench::app::kExitUsage;
    }

    try {
        if (list->parsed()) return emubench::app::run_list(std::cout);
        CLI::App* cmd = generate->parsed() ? generate : experiment->parsed() ? experiment : metrics;
        const RunConfig config = build_config(cmd, f);
        if (cmd == generate) return emubench::app::run_generate(config, std::cout, std::cerr);
        if (cmd == experiment) return emubench::app::run_experiment(config, std::cout, std::cerr);
        return emubench::app::run_metrics(config, std::cout, std::cerr);
    } catch (const emubench::ConfigError& e) {
        std::cerr << "error: " << e.what() << "\n";
        return emubench::app::kExitUsage;
    }
}
