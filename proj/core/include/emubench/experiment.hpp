#pragma once

// Linear-stencil emulation of 1D advection: train a two-tap stencil under
// several unrolling methodologies and compare its test rollouts with the
// first-order upwind scheme.

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "emubench/metrics.hpp"
#include "emubench/scenarios.hpp"
#include "emubench/training.hpp"

namespace emubench {

struct StencilExperimentConfig {
    double gamma1 = 0.75;
    int num_points = 30;
    int ic_cutoff = 5;
    int train_samples = 5;
    int train_steps = 200;
    int test_samples = 50;
    int test_steps = 200;
    std::uint64_t seed = 0;
    std::vector<std::string> methodologies{"one", "sup;2", "sup;5", "sup;10", "sup;20", "sup;50"};
    CorrectionVariant correction = CorrectionVariant::none;
    double coarse_proportion = 0.0;
    std::vector<std::string> metrics{"mean_nRMSE"};
    int horizon = kDefaultHorizon;
    /// Methodologies with T above this start from the previous optimum.
    int warm_start_after = 10;
    NewtonOptions newton;
    unsigned threads = 0;
};

struct ExperimentCell {
    std::string methodology;
    int T = 1;
    int B = 1;
    bool ok = true;
    std::string error;
    std::vector<double> theta;
    double objective = 0.0;
    int iterations = 0;
    double distance_to_fou = 0.0;
    std::map<std::string, RolloutReport> metrics;
};

struct ExperimentReport {
    StencilExperimentConfig config;
    std::string scenario;
    std::vector<double> fou_theta;
    std::map<std::string, RolloutReport> fou_metrics;
    std::vector<ExperimentCell> cells;
};

/// The advection scenario the experiment trains on.
[[nodiscard]] ScenarioSpec stencil_experiment_spec(const StencilExperimentConfig& config);

/// Rolls the emulator out from every test initial condition for as many
/// steps as the reference trajectories hold.
[[nodiscard]] std::vector<Trajectory> emulator_rollouts(const Emulator& emulator, std::span<const double> theta,
                                                        const TrajectorySet& reference);

/// Newton failures mark the cell instead of aborting the experiment.
[[nodiscard]] ExperimentReport run_stencil_experiment(const StencilExperimentConfig& config);

}  // namespace emubench
