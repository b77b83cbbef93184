#include "emubench/metrics.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "emubench/error.hpp"
#include "emubench/spectral.hpp"

namespace emubench {
namespace {

// Reduces one channel of `values` (a difference or a plain field) with the
// inner exponent. State space: mean over grid points. Fourier space: weighted
// half-spectrum sum of the normalized coefficients, optionally restricted and
// with derivative terms added.
class ChannelReducer {
public:
    ChannelReducer(const MetricDescriptor& desc, const Grid& grid) : desc_(desc), grid_(grid) {
        if (desc.space != MetricSpace::fourier) return;
        const WavenumberGrid wn = build_wavenumber_grid(grid);
        const std::vector<double> weights = conjugate_weights(grid);
        const std::size_t m = grid.spectral_size();
        weights_.assign(m, 0.0);
        for (std::size_t i = 0; i < m; ++i) {
            double k2 = 0.0;
            for (int d = 0; d < grid.num_dims; ++d) {
                const double k = wn.flat[static_cast<std::size_t>(d)][i];
                k2 += k * k;
            }
            const double kmag = std::sqrt(k2);
            const bool inside = kmag >= desc.k_low && (desc.k_high < 0.0 || kmag <= desc.k_high);
            if (inside) weights_[i] = weights[i];
        }
        if (desc.derivative_order == 1) {
            wavenumbers_.resize(static_cast<std::size_t>(grid.num_dims));
            for (int d = 0; d < grid.num_dims; ++d) {
                auto& axis = wavenumbers_[static_cast<std::size_t>(d)];
                axis.resize(m);
                for (std::size_t i = 0; i < m; ++i) axis[i] = std::abs(wn.scaled(d, i));
            }
        }
        scratch_.resize(m);
        scale_ = 1.0 / static_cast<double>(grid.spatial_size());
    }

    double operator()(std::span<const double> values) {
        const double p = desc_.inner_exponent;
        if (desc_.space == MetricSpace::state) {
            double sum = 0.0;
            for (const double v : values) sum += std::pow(std::abs(v), p);
            return sum / static_cast<double>(values.size());
        }
        detail::forward_channel(grid_, values, scratch_);
        double sum = 0.0;
        for (std::size_t i = 0; i < scratch_.size(); ++i) {
            if (weights_[i] == 0.0) continue;
            const double mag = std::abs(scratch_[i]) * scale_;
            double term = std::pow(mag, p);
            for (const auto& axis : wavenumbers_) term += std::pow(axis[i] * mag, p);
            sum += weights_[i] * term;
        }
        return sum;
    }

private:
    const MetricDescriptor& desc_;
    Grid grid_;
    std::vector<double> weights_;
    std::vector<std::vector<double>> wavenumbers_;
    std::vector<Complex> scratch_;
    double scale_ = 1.0;
};

void require_same(const SpatialField& pred, const SpatialField& target) {
    if (pred.grid() != target.grid() || pred.channels() != target.channels()) {
        throw ShapeError("metric: prediction and target shapes differ");
    }
}

double aggregate_channels(const MetricDescriptor& desc, double sum, int channels) {
    return desc.channels == ChannelAggregation::mean ? sum / channels : sum;
}

double cosine(std::span<const double> a, std::span<const double> b) {
    double ab = 0.0;
    double aa = 0.0;
    double bb = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) {
        ab += a[i] * b[i];
        aa += a[i] * a[i];
        bb += b[i] * b[i];
    }
    if (aa == 0.0 || bb == 0.0) throw NumericError("correlation: zero-norm field");
    return ab / std::sqrt(aa * bb);
}

}  // namespace

void MetricDescriptor::validate() const {
    const bool fourier_options = restricts_frequencies() || derivative_order != 0;
    if (fourier_options && space != MetricSpace::fourier) {
        throw ConfigError("metric: frequency range and derivative order need fourier space");
    }
    if (comparison == Comparison::inner_product && normalization != Normalization::absolute) {
        throw ConfigError("metric: inner product comparison only supports absolute normalization");
    }
    if (derivative_order != 0 && derivative_order != 1) throw ConfigError("metric: derivative order must be 0 or 1");
    if (!(inner_exponent > 0.0) || !(outer_exponent > 0.0)) throw ConfigError("metric: exponents must be positive");
    if (k_low < 0.0 || (k_high >= 0.0 && k_high < k_low)) throw ConfigError("metric: invalid frequency range");
}

const std::vector<std::string>& metric_names() {
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const char* family : {"MAE", "MSE", "RMSE"}) {
            for (const char* norm : {"", "n", "s"}) out.push_back(std::string("mean_") + norm + family);
        }
        for (const char* space : {"fourier_", "H1_"}) {
            for (const char* family : {"MAE", "MSE", "RMSE"}) {
                for (const char* norm : {"", "n"}) out.push_back(std::string("mean_") + space + norm + family);
            }
        }
        out.emplace_back("mean_correlation");
        return out;
    }();
    return names;
}

MetricDescriptor metric_by_name(std::string_view name) {
    MetricDescriptor d;
    if (name == "mean_correlation") {
        d.comparison = Comparison::inner_product;
        return d;
    }
    std::string_view rest = name;
    const auto fail = [&] { return ConfigError("unknown metric: " + std::string(name)); };
    if (!rest.starts_with("mean_")) throw fail();
    rest.remove_prefix(5);
    bool state = true;
    if (rest.starts_with("fourier_")) {
        d.space = MetricSpace::fourier;
        state = false;
        rest.remove_prefix(8);
    } else if (rest.starts_with("H1_")) {
        d.space = MetricSpace::fourier;
        d.derivative_order = 1;
        state = false;
        rest.remove_prefix(3);
    }
    if (rest.starts_with("n") || (state && rest.starts_with("s"))) {
        d.normalization = rest.front() == 'n' ? Normalization::normalized : Normalization::symmetric;
        rest.remove_prefix(1);
    }
    if (rest == "MAE") {
        d.inner_exponent = 1.0;
    } else if (rest == "MSE") {
        d.inner_exponent = 2.0;
    } else if (rest == "RMSE") {
        d.inner_exponent = 2.0;
        d.outer_exponent = 0.5;
    } else {
        throw fail();
    }
    return d;
}

double compute_metric(const MetricDescriptor& desc, const SpatialField& pred, const SpatialField& target) {
    desc.validate();
    require_same(pred, target);
    if (desc.comparison == Comparison::inner_product) {
        if (desc.space != MetricSpace::state) throw ConfigError("metric: inner product is defined in state space");
        double sum = 0.0;
        for (int c = 0; c < pred.channels(); ++c) sum += cosine(pred.channel(c), target.channel(c));
        return aggregate_channels(desc, sum, pred.channels());
    }

    ChannelReducer reduce(desc, pred.grid());
    std::vector<double> diff(pred.channel_size());
    double sum = 0.0;
    for (int c = 0; c < pred.channels(); ++c) {
        const auto p = pred.channel(c);
        const auto t = target.channel(c);
        for (std::size_t i = 0; i < diff.size(); ++i) diff[i] = p[i] - t[i];
        double value = std::pow(reduce(diff), desc.outer_exponent);
        if (desc.normalization == Normalization::normalized) {
            const double denom = std::pow(reduce(t), desc.outer_exponent);
            if (denom == 0.0) throw NumericError("degenerate target");
            value /= denom;
        } else if (desc.normalization == Normalization::symmetric) {
            const double denom = 0.5 * (std::pow(reduce(p), desc.outer_exponent) + std::pow(reduce(t), desc.outer_exponent));
            if (denom == 0.0) throw NumericError("degenerate target");
            value /= denom;
        }
        sum += value;
    }
    return aggregate_channels(desc, sum, pred.channels());
}

double compute_metric(const MetricDescriptor& desc, std::span<const SpatialField> pred,
                      std::span<const SpatialField> target) {
    if (pred.size() != target.size() || pred.empty()) throw ShapeError("metric: sample counts differ or are zero");
    double sum = 0.0;
    for (std::size_t s = 0; s < pred.size(); ++s) sum += compute_metric(desc, pred[s], target[s]);
    return sum / static_cast<double>(pred.size());
}

double correlation(const SpatialField& pred, const SpatialField& target) {
    MetricDescriptor d;
    d.comparison = Comparison::inner_product;
    return compute_metric(d, pred, target);
}

RolloutReport aggregate_losses(std::vector<double> losses, int horizon) {
    if (horizon < 1) throw ConfigError("rollout metrics: horizon must be >= 1");
    RolloutReport report;
    report.losses = std::move(losses);
    report.horizon = horizon;
    const std::size_t window = std::min(report.losses.size(), static_cast<std::size_t>(horizon));
    if (window == 0) {
        report.degenerate = true;
        return report;
    }
    double log_sum = 0.0;
    for (std::size_t t = 0; t < window; ++t) {
        if (!(report.losses[t] > 0.0)) {
            report.degenerate = true;
            return report;
        }
        log_sum += std::log(report.losses[t]);
    }
    report.aggregate = std::exp(log_sum / static_cast<double>(window));
    return report;
}

RolloutReport rollout_metrics(std::span<const Trajectory> pred, std::span<const Trajectory> ref,
                              const MetricDescriptor& desc, int horizon) {
    if (pred.size() != ref.size() || pred.empty()) throw ShapeError("rollout metrics: sample counts differ or are zero");
    const int snapshots = ref.front().num_snapshots();
    for (std::size_t s = 0; s < pred.size(); ++s) {
        for (const Trajectory* traj : {&pred[s], &ref[s]}) {
            if (traj->num_snapshots() != snapshots || traj->grid() != ref.front().grid() ||
                traj->channels() != ref.front().channels()) {
                throw ShapeError("rollout metrics: trajectory shapes differ");
            }
        }
    }
    std::vector<double> losses(static_cast<std::size_t>(snapshots - 1), 0.0);
    for (int t = 1; t < snapshots; ++t) {
        double sum = 0.0;
        for (std::size_t s = 0; s < pred.size(); ++s) {
            sum += compute_metric(desc, pred[s].snapshot(t), ref[s].snapshot(t));
        }
        losses[static_cast<std::size_t>(t - 1)] = sum / static_cast<double>(pred.size());
    }
    return aggregate_losses(std::move(losses), horizon);
}

}  // namespace emubench
