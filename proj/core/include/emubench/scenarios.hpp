#pragma once

// Benchmark registry: dynamics, interface modes, default parameter tables,
// initial conditions and dataset generation.

#include <cstdint>
#include <functional>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "emubench/etdrk.hpp"
#include "emubench/field.hpp"
#include "emubench/spectral.hpp"

namespace emubench {

enum class InterfaceMode { difficulty, normalized, physical };

/// "diff", "norm" or "phy".
[[nodiscard]] std::string_view mode_prefix(InterfaceMode mode);

enum class Split { train, test };
[[nodiscard]] std::string_view split_name(Split split);

// Nonlinear component keys used in the difficulty tables.
inline constexpr std::string_view kConv = "conv";
inline constexpr std::string_view kConvSc = "conv_sc";
inline constexpr std::string_view kGradNorm = "gn";
inline constexpr std::string_view kQuad = "quad";

/// Derivative order that enters the nonlinear normalization: the product of
/// pre-derivative order and polynomial degree plus the post-derivative order.
[[nodiscard]] int nonlinear_order(std::string_view component);

struct DifficultyCoefficients {
    std::vector<double> gammas;
    std::map<std::string, double> deltas;
    int num_points = 160;
    int num_dims = 1;
    double max_abs = 1.0;
};

struct NormalizedCoefficients {
    std::vector<double> alphas;
    std::map<std::string, double> betas;
};

/// alpha_j = gamma_j / (N^j 2^(j-1) D), beta = delta / (N^order D m).
[[nodiscard]] NormalizedCoefficients difficulty_to_normalized(const DifficultyCoefficients& diff);
[[nodiscard]] DifficultyCoefficients normalized_to_difficulty(const NormalizedCoefficients& norm, int num_points,
                                                              int num_dims, double max_abs = 1.0);

/// One row of the dynamics table.
struct DynamicInfo {
    std::string name;
    std::string title;
    /// Class tags: L(inear), N(onlinear), D(ecaying), I(nfinite), S(teady),
    /// M(ulti-channel), C(haotic).
    std::string classes;
    std::vector<int> dims;
    /// Supported modes; the first one is preferred.
    std::vector<InterfaceMode> modes;
};

[[nodiscard]] const std::vector<DynamicInfo>& dynamics_table();
[[nodiscard]] const DynamicInfo& dynamic_info(std::string_view name);

struct ScenarioDescriptor {
    std::string name;
    int num_dims = 1;
    std::string classes;
    std::vector<InterfaceMode> modes;

    /// Canonical id under the preferred mode, e.g. "2d_diff_burgers".
    [[nodiscard]] std::string canonical_name() const;
};

/// Every (dynamic, dimension) pair of the dynamics table.
[[nodiscard]] std::vector<ScenarioDescriptor> registry_list();

struct IcConfig {
    int cutoff = 5;
    double offset_min = 0.0;
    double offset_max = 0.0;
    bool normalize_max_abs = true;
    /// Gray-Scott blob width as a fraction of L.
    double blob_sigma = 0.1;
    /// Blob centers are drawn uniformly within +-jitter*L of the domain
    /// center; 0 keeps the blob centered.
    double blob_jitter = 0.0;
};

struct DatasetRecipe {
    int train_samples = 50;
    int train_steps = 50;
    int test_samples = 30;
    int test_steps = 200;
};

struct ScenarioSpec {
    /// Registry row, or "gs_type" for the Gray-Scott type interface.
    std::string dynamic;
    InterfaceMode mode = InterfaceMode::difficulty;
    int num_dims = 1;
    int num_points = 160;
    /// Mode-specific coefficients. Difficulty: gamma0..4, delta_<comp>, m.
    /// Normalized: alpha0..4, beta_<comp>. Physical: L, dt and the
    /// constitutive constants of the dynamic.
    std::map<std::string, double> params;
    /// Gray-Scott type name for "gs_type".
    std::string gs_type;
    /// Divergence form for the multi-channel convection rows.
    bool conservative = true;
    int order = 2;
    int substeps = 1;
    int warmup = 0;
    ContourOptions contour;
    KeepFraction dealias;
    IcConfig ic;
    DatasetRecipe recipe;

    [[nodiscard]] std::string canonical_name() const;
    [[nodiscard]] int channels() const;
    [[nodiscard]] double extent() const;
    [[nodiscard]] double dt() const;
    [[nodiscard]] Grid grid() const;
    [[nodiscard]] double param(const std::string& key) const;
};

struct ParsedScenarioId {
    InterfaceMode mode;
    std::string dynamic;
    int num_dims = 0;  // 0 if the id carried no "<D>d_" prefix
};

/// Grammar: ["<D>d_"]["diff_"|"norm_"|"phy_"]name. Without a mode prefix the
/// preferred mode of the dynamic is used.
[[nodiscard]] ParsedScenarioId parse_scenario_id(std::string_view id);

/// Fully defaulted spec for an id at the given dimension. Throws ConfigError
/// "unknown scenario" or "mode unsupported for dynamic".
[[nodiscard]] ScenarioSpec resolve_scenario(std::string_view id, int num_dims);

/// Applies one textual override. Recognized keys: N, order, substeps, warmup,
/// contour_radius, contour_points, dealias (e.g. "2/3"), ic_cutoff,
/// ic_offset_min, ic_offset_max, ic_normalize, ic_blob_sigma,
/// ic_blob_jitter, conservative, train_samples, train_steps, test_samples, test_steps,
/// type (Gray-Scott), plus any key of spec.params. Unknown keys throw.
void apply_override(ScenarioSpec& spec, const std::string& key, const std::string& value);

/// Feed and kill rates of a Gray-Scott type name.
struct GrayScottRates {
    double feed;
    double kill;
};
[[nodiscard]] GrayScottRates gray_scott_type(std::string_view type);
[[nodiscard]] const std::vector<std::string>& gray_scott_type_names();

[[nodiscard]] Stepper build_stepper_from_spec(const ScenarioSpec& spec);

/// Coarse solver for correction layouts: gamma/delta (difficulty), alpha/beta
/// (normalized) or dt (physical) scaled by `proportion`. proportion = 0
/// yields the identity map.
[[nodiscard]] Stepper build_coarse_stepper(const ScenarioSpec& spec, double proportion);

[[nodiscard]] SpatialField sample_initial_condition(const ScenarioSpec& spec, std::uint64_t seed);

/// Seed of sample `index` in `split`; train and test use disjoint streams.
[[nodiscard]] std::uint64_t sample_seed(std::uint64_t seed, Split split, int index);

/// Samples stored as (S, T+1, C, N, [N, [N]]).
struct TrajectorySet {
    std::string name;
    Split split = Split::train;
    std::uint64_t seed = 0;
    Grid grid;
    int samples = 0;
    int snapshots = 0;
    int channels = 0;
    std::vector<double> data;

    [[nodiscard]] std::size_t trajectory_size() const noexcept {
        return static_cast<std::size_t>(snapshots) * static_cast<std::size_t>(channels) * grid.spatial_size();
    }
    [[nodiscard]] std::vector<std::size_t> shape() const;
    [[nodiscard]] Trajectory trajectory(int sample) const;
    [[nodiscard]] SpatialField state(int sample, int t) const;
};

/// Receives finished trajectories in sample order.
using TrajectorySink = std::function<void(int sample, const Trajectory& traj)>;

/// Generates one split, streaming each trajectory to `sink` in sample order.
/// Samples run in parallel in batches of `threads`; output is independent of
/// the thread count. Divergence throws DivergenceError naming the sample.
void generate_dataset_streaming(const ScenarioSpec& spec, Split split, std::uint64_t seed, unsigned threads,
                                const TrajectorySink& sink);

[[nodiscard]] TrajectorySet generate_dataset(const ScenarioSpec& spec, Split split, std::uint64_t seed,
                                             unsigned threads = 0);

}  // namespace emubench
