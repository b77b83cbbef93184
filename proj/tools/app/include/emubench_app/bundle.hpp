#pragma once

// Dataset export: a payload of little-endian float64 values in C order with
// shape (S, T+1, C, N, [N, [N]]) plus a JSON sidecar describing it.

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "emubench/scenarios.hpp"

namespace emubench::app {

inline constexpr int kFormatVersion = 1;

enum class ExportFormat { raw64, csv };

[[nodiscard]] ExportFormat parse_export_format(std::string_view name);
[[nodiscard]] std::string_view export_format_name(ExportFormat format);

/// Incremental FNV-1a 64-bit hash.
class Fnv1a64 {
public:
    void update(std::span<const unsigned char> bytes) noexcept;
    void update(std::string_view text) noexcept;
    [[nodiscard]] std::uint64_t value() const noexcept { return state_; }
    [[nodiscard]] std::string hex() const;

private:
    std::uint64_t state_ = 0xcbf29ce484222325ULL;
};

struct BundlePaths {
    std::filesystem::path payload;
    std::filesystem::path sidecar;
};

/// Generates one split and streams it to `<dir>/<name>.<split>.<format>`,
/// then writes the `.json` sidecar. csv is limited to 1D scenarios.
BundlePaths write_bundle(const std::filesystem::path& dir, const ScenarioSpec& spec, Split split, std::uint64_t seed,
                         ExportFormat format, unsigned threads);

/// Writes an in-memory set (for example emulator rollouts) as a raw64 bundle
/// named `<dir>/<stem>.raw64` with its sidecar.
BundlePaths save_trajectory_set(const std::filesystem::path& dir, const std::string& stem, const ScenarioSpec& spec,
                                const TrajectorySet& set);

struct LoadedBundle {
    ScenarioSpec spec;
    TrajectorySet data;
    nlohmann::json sidecar;
};

/// Reads a raw64 bundle from its sidecar (or payload) path and verifies the
/// byte length and checksum.
[[nodiscard]] LoadedBundle read_bundle(const std::filesystem::path& path);

[[nodiscard]] nlohmann::json read_sidecar(const std::filesystem::path& path);

}  // namespace emubench::app
