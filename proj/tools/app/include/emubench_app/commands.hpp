#pragma once

// Verbs of the emubench tool. Each returns a process exit code:
// 0 success (including experiments with failed cells), 2 usage or
// configuration errors, 3 numeric failures such as diverging trajectories.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "emubench/experiment.hpp"
#include "emubench_app/bundle.hpp"

namespace emubench::app {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNumeric = 3;

struct RunConfig {
    std::string scenario;
    int dims = 1;
    std::uint64_t seed = 0;
    std::filesystem::path out = ".";
    ExportFormat format = ExportFormat::raw64;
    /// Scenario overrides applied in order (see apply_override).
    std::vector<std::pair<std::string, std::string>> overrides;
    unsigned threads = 0;
    std::optional<std::filesystem::path> from_sidecar;

    StencilExperimentConfig experiment;

    std::filesystem::path pred;
    std::filesystem::path ref;
    std::vector<std::string> metrics{"mean_MSE", "mean_fourier_MSE", "mean_nRMSE"};
    int horizon = kDefaultHorizon;
};

/// Applies a JSON config object whose keys mirror the long command-line
/// flags. Unknown keys throw ConfigError.
void apply_config_json(const nlohmann::json& j, RunConfig& config);
void load_config_file(const std::filesystem::path& path, RunConfig& config);

int run_generate(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_experiment(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_metrics(const RunConfig& config, std::ostream& out, std::ostream& err);
int run_list(std::ostream& out);

}  // namespace emubench::app
