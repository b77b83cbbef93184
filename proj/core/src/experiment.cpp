#include "emubench/experiment.hpp"

#include <cmath>
#include <memory>
#include <string>

#include "emubench/error.hpp"

namespace emubench {

ScenarioSpec stencil_experiment_spec(const StencilExperimentConfig& config) {
    ScenarioSpec spec = resolve_scenario("diff_adv", 1);
    spec.num_points = config.num_points;
    spec.params["gamma1"] = config.gamma1;
    spec.ic.cutoff = config.ic_cutoff;
    spec.recipe.train_samples = config.train_samples;
    spec.recipe.train_steps = config.train_steps;
    spec.recipe.test_samples = config.test_samples;
    spec.recipe.test_steps = config.test_steps;
    return spec;
}

std::vector<Trajectory> emulator_rollouts(const Emulator& emulator, std::span<const double> theta,
                                          const TrajectorySet& reference) {
    std::vector<Trajectory> out;
    out.reserve(static_cast<std::size_t>(reference.samples));
    for (int s = 0; s < reference.samples; ++s) {
        Trajectory traj(reference.grid, reference.channels, reference.snapshots);
        SpatialField u = reference.state(s, 0);
        traj.set_snapshot(0, u);
        for (int t = 1; t < reference.snapshots; ++t) {
            u = emulator.apply(theta, u);
            traj.set_snapshot(t, u);
        }
        out.push_back(std::move(traj));
    }
    return out;
}

namespace {

std::map<std::string, RolloutReport> evaluate(const Emulator& emulator, std::span<const double> theta,
                                              const TrajectorySet& test, const std::vector<Trajectory>& reference,
                                              const StencilExperimentConfig& config) {
    const auto pred = emulator_rollouts(emulator, theta, test);
    std::map<std::string, RolloutReport> out;
    for (const auto& name : config.metrics) {
        out[name] = rollout_metrics(pred, reference, metric_by_name(name), config.horizon);
    }
    return out;
}

}  // namespace

ExperimentReport run_stencil_experiment(const StencilExperimentConfig& config) {
    ExperimentReport report;
    report.config = config;
    const ScenarioSpec spec = stencil_experiment_spec(config);
    report.scenario = spec.canonical_name();
    for (const auto& name : config.metrics) (void)metric_by_name(name);

    const auto reference = std::make_shared<const Stepper>(build_stepper_from_spec(spec));
    const TrajectorySet train = generate_dataset(spec, Split::train, config.seed, config.threads);
    const TrajectorySet test = generate_dataset(spec, Split::test, config.seed, config.threads);
    std::vector<Trajectory> test_refs;
    test_refs.reserve(static_cast<std::size_t>(test.samples));
    for (int s = 0; s < test.samples; ++s) test_refs.push_back(test.trajectory(s));

    const auto stencil = std::make_shared<const LinearStencilEmulator>();
    report.fou_theta = fou_stencil(config.gamma1);
    report.fou_metrics = evaluate(*stencil, report.fou_theta, test, test_refs, config);

    const auto layout = make_correction_layout(spec, config.correction, config.coarse_proportion);
    const auto emulator = compose_correction(layout, stencil);
    // A corrector starts from the identity; a pure predictor from FOU.
    const std::vector<double> initial =
        config.correction == CorrectionVariant::none ? report.fou_theta : std::vector<double>{1.0, 0.0};

    std::vector<double> previous = initial;
    for (const auto& label : config.methodologies) {
        const Methodology m = parse_methodology(label);
        ExperimentCell cell;
        cell.methodology = label;
        cell.T = m.config.T;
        cell.B = m.config.B;
        const std::vector<double> start = m.config.T > config.warm_start_after ? previous : initial;
        try {
            const UnrolledObjective objective(emulator, reference, train, m.config, config.threads);
            const auto result = train_newton(
                [&](std::span<const double> live, std::span<const double> frozen) { return objective(live, frozen); },
                start, config.newton);
            cell.theta = result.theta;
            cell.objective = result.objective;
            cell.iterations = result.iterations;
        } catch (const OptimizationError& e) {
            cell.ok = false;
            cell.error = e.what();
            cell.theta = e.best_params();
        } catch (const ConfigError& e) {
            cell.ok = false;
            cell.error = e.what();
            cell.theta = start;
        }
        cell.distance_to_fou = std::hypot(cell.theta[0] - report.fou_theta[0], cell.theta[1] - report.fou_theta[1]);
        cell.metrics = evaluate(*emulator, cell.theta, test, test_refs, config);
        if (cell.ok) previous = cell.theta;
        report.cells.push_back(std::move(cell));
    }
    return report;
}

}  // namespace emubench
