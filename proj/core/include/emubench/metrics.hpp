#pragma once

// Rollout comparison metrics. A metric is assembled from a descriptor and
// evaluated in a fixed order: difference, spatial reduction with the inner
// exponent, outer exponent, optional normalization, channel aggregation and
// finally the mean over samples.

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emubench/etdrk.hpp"
#include "emubench/field.hpp"

namespace emubench {

enum class MetricSpace { state, fourier };
enum class Normalization { absolute, normalized, symmetric };
enum class Comparison { difference, inner_product };
enum class ChannelAggregation { mean, sum };

struct MetricDescriptor {
    MetricSpace space = MetricSpace::state;
    double inner_exponent = 2.0;
    double outer_exponent = 1.0;
    Normalization normalization = Normalization::absolute;
    Comparison comparison = Comparison::difference;
    /// Euclidean integer wavenumber magnitude range, inclusive. A negative
    /// upper bound means unbounded. Fourier space only.
    double k_low = 0.0;
    double k_high = -1.0;
    /// 0 for the plain spectrum, 1 adds every first-derivative term with unit
    /// weight (H1-style). Fourier space only.
    int derivative_order = 0;
    ChannelAggregation channels = ChannelAggregation::mean;

    /// Throws ConfigError if the combination is invalid.
    void validate() const;
    [[nodiscard]] bool restricts_frequencies() const noexcept { return k_low > 0.0 || k_high >= 0.0; }
};

/// Descriptor for a name such as "mean_nRMSE", "mean_fourier_MSE",
/// "mean_H1_nMAE" or "mean_correlation". Throws ConfigError if unknown.
[[nodiscard]] MetricDescriptor metric_by_name(std::string_view name);
[[nodiscard]] const std::vector<std::string>& metric_names();

/// Metric of a single sample. Throws ShapeError on mismatched shapes and
/// NumericError("degenerate target") when a normalizing norm vanishes.
[[nodiscard]] double compute_metric(const MetricDescriptor& desc, const SpatialField& pred, const SpatialField& target);

/// Mean of the per-sample metric.
[[nodiscard]] double compute_metric(const MetricDescriptor& desc, std::span<const SpatialField> pred,
                                    std::span<const SpatialField> target);

/// Channel-averaged cosine similarity of the flattened fields.
[[nodiscard]] double correlation(const SpatialField& pred, const SpatialField& target);

inline constexpr int kDefaultHorizon = 100;

struct RolloutReport {
    /// losses[t - 1] is the sample-averaged metric at step t.
    std::vector<double> losses;
    /// Geometric mean over the first `horizon` steps, or 0 when flagged.
    double aggregate = 0.0;
    /// Set when a loss in the aggregation window is not strictly positive.
    bool degenerate = false;
    int horizon = kDefaultHorizon;
};

/// exp(mean(log L)) over the first `horizon` entries of `losses`.
[[nodiscard]] RolloutReport aggregate_losses(std::vector<double> losses, int horizon = kDefaultHorizon);

/// Per-step metric for t = 1..T averaged over samples. All trajectories must
/// share one shape.
[[nodiscard]] RolloutReport rollout_metrics(std::span<const Trajectory> pred, std::span<const Trajectory> ref,
                                            const MetricDescriptor& desc, int horizon = kDefaultHorizon);

}  // namespace emubench
