#pragma once

#include <json.hpp>

#include "emubench/experiment.hpp"
#include "emubench/scenarios.hpp"

namespace emubench::app {

/// Every field of a resolved spec; enough to rebuild it without the
/// original configuration.
[[nodiscard]] nlohmann::json spec_to_json(const ScenarioSpec& spec);

/// Inverse of spec_to_json. Validates the dynamic, mode and dimension through
/// the registry and rejects unknown or missing keys.
[[nodiscard]] ScenarioSpec spec_from_json(const nlohmann::json& j);

[[nodiscard]] nlohmann::json report_to_json(const RolloutReport& report);
[[nodiscard]] nlohmann::json experiment_to_json(const ExperimentReport& report);

}  // namespace emubench::app
