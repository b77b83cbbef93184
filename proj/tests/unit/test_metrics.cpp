#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "emubench/error.hpp"
#include "emubench/metrics.hpp"
#include "oracles.hpp"

using namespace emubench;

namespace {

constexpr double kPi = std::numbers::pi;

double metric(std::string_view name, const SpatialField& pred, const SpatialField& target) {
    return compute_metric(metric_by_name(name), pred, target);
}

SpatialField sine(const Grid& grid, int k, double amp = 1.0) {
    return oracle::sample_1d(grid, [&](double x) { return amp * std::sin(2.0 * kPi * k * x); });
}

}  // namespace

TEST(Metrics, AbsoluteFamiliesOnAConstantOffset) {
    const Grid grid(1, 16);
    oracle::Gen gen(1);
    const SpatialField target = gen.noise(grid, 1);
    SpatialField pred = target;
    for (double& v : pred.data()) v += 0.3;
    EXPECT_NEAR(metric("mean_MAE", pred, target), 0.3, 1e-14);
    EXPECT_NEAR(metric("mean_MSE", pred, target), 0.09, 1e-14);
    EXPECT_NEAR(metric("mean_RMSE", pred, target), 0.3, 1e-14);
}

TEST(Metrics, NormalizedRmseOfAScaledTarget) {
    const Grid grid(1, 32);
    oracle::Gen gen(2);
    const SpatialField target = gen.bandlimited(grid, 1, 5);
    const SpatialField pred = 1.1 * target;
    EXPECT_NEAR(metric("mean_nRMSE", pred, target), 0.1, 1e-12);
    EXPECT_NEAR(metric("mean_nMSE", pred, target), 0.01, 1e-12);
    EXPECT_NEAR(metric("mean_nMAE", pred, target), 0.1, 1e-12);
    EXPECT_NEAR(metric("mean_nRMSE", SpatialField(grid, 1), target), 1.0, 1e-14);
}

TEST(Metrics, SymmetricNormalizationUsesBothNorms) {
    const Grid grid(1, 8);
    SpatialField pred(grid, 1);
    SpatialField target(grid, 1);
    for (double& v : pred.data()) v = 2.0;
    for (double& v : target.data()) v = 1.0;
    EXPECT_NEAR(metric("mean_sMAE", pred, target), 1.0 / 1.5, 1e-14);
    EXPECT_NEAR(metric("mean_sMAE", target, pred), 1.0 / 1.5, 1e-14);
}

TEST(Metrics, ZeroTargetIsDegenerateForNormalizedMetrics) {
    const Grid grid(1, 8);
    const SpatialField zero(grid, 1);
    const auto pred = sine(grid, 1);
    EXPECT_THROW((void)metric("mean_nRMSE", pred, zero), NumericError);
    EXPECT_THROW((void)metric("mean_sMAE", zero, zero), NumericError);
    EXPECT_DOUBLE_EQ(metric("mean_MSE", zero, zero), 0.0);
}

TEST(Metrics, FourierMseOfASineIsHalfItsAmplitudeSquared) {
    const Grid grid(1, 32);
    const SpatialField zero(grid, 1);
    EXPECT_NEAR(metric("mean_fourier_MSE", sine(grid, 3, 2.0), zero), 2.0, 1e-13);
    EXPECT_NEAR(metric("mean_MSE", sine(grid, 3, 2.0), zero), 2.0, 1e-13);
}

TEST(Metrics, FrequencyRestrictionSelectsABand) {
    const Grid grid(1, 32);
    const SpatialField zero(grid, 1);
    const SpatialField both = sine(grid, 1) + sine(grid, 5, 3.0);
    auto desc = metric_by_name("mean_fourier_MSE");
    desc.k_high = 3.0;
    EXPECT_NEAR(compute_metric(desc, both, zero), 0.5, 1e-13);
    desc.k_low = 4.0;
    desc.k_high = -1.0;
    EXPECT_NEAR(compute_metric(desc, both, zero), 4.5, 1e-12);
}

TEST(Metrics, H1AddsTheGradientEnergy) {
    const Grid grid(1, 32, 2.0);
    const SpatialField zero(grid, 1);
    const auto u = oracle::sample_1d(grid, [](double x) { return std::sin(2.0 * kPi * 2.0 * x / 2.0); });
    const double kappa = 2.0 * kPi * 2.0 / 2.0;
    EXPECT_NEAR(metric("mean_H1_MSE", u, zero), 0.5 * (1.0 + kappa * kappa), 1e-11);
}

TEST(Metrics, ChannelsAreAveragedUnlessSummed) {
    const Grid grid(1, 8);
    SpatialField pred(grid, 2);
    const SpatialField target(grid, 2);
    for (double& v : pred.channel(0)) v = 1.0;
    for (double& v : pred.channel(1)) v = 3.0;
    EXPECT_NEAR(metric("mean_MSE", pred, target), 5.0, 1e-14);
    auto desc = metric_by_name("mean_MSE");
    desc.channels = ChannelAggregation::sum;
    EXPECT_NEAR(compute_metric(desc, pred, target), 10.0, 1e-14);
}

TEST(Metrics, SampleMeanOverASpan) {
    const Grid grid(1, 8);
    std::vector<SpatialField> pred(2, SpatialField(grid, 1));
    const std::vector<SpatialField> target(2, SpatialField(grid, 1));
    for (double& v : pred[1].data()) v = 2.0;
    EXPECT_NEAR(compute_metric(metric_by_name("mean_MAE"), pred, target), 1.0, 1e-15);
}

TEST(Metrics, CorrelationOfSinesAndCosines) {
    const Grid grid(1, 64);
    const auto s = sine(grid, 1);
    const auto c = oracle::sample_1d(grid, [](double x) { return std::cos(2.0 * kPi * x); });
    EXPECT_NEAR(correlation(s, c), 0.0, 1e-14);
    EXPECT_NEAR(correlation(s, 2.0 * s), 1.0, 1e-14);
    EXPECT_NEAR(correlation(s, -1.0 * s), -1.0, 1e-14);
    EXPECT_NEAR(metric("mean_correlation", s, 2.0 * s), 1.0, 1e-14);
    EXPECT_THROW((void)correlation(s, SpatialField(grid, 1)), NumericError);
}

TEST(Metrics, ShapeMismatchIsRejected) {
    EXPECT_THROW((void)metric("mean_MSE", SpatialField(Grid(1, 8), 1), SpatialField(Grid(1, 16), 1)), ShapeError);
    EXPECT_THROW((void)metric("mean_MSE", SpatialField(Grid(1, 8), 1), SpatialField(Grid(1, 8), 2)), ShapeError);
}

TEST(Metrics, GeometricMeanOverTheHorizon) {
    const auto r = aggregate_losses({0.01, 0.04, 1000.0}, 2);
    EXPECT_NEAR(r.aggregate, 0.02, 1e-15);
    EXPECT_FALSE(r.degenerate);
    const auto z = aggregate_losses({0.01, 0.0}, 2);
    EXPECT_TRUE(z.degenerate);
    EXPECT_EQ(z.aggregate, 0.0);
    // Losses past the horizon never flag the aggregate.
    EXPECT_FALSE(aggregate_losses({0.5, 0.0}, 1).degenerate);
}

TEST(Metrics, RolloutReportHasOneLossPerStep) {
    const Grid grid(1, 8);
    Trajectory pred(grid, 1, 4);
    Trajectory ref(grid, 1, 4);
    for (int t = 0; t < 4; ++t) {
        SpatialField p(grid, 1);
        SpatialField r(grid, 1);
        for (double& v : p.data()) v = t;
        for (double& v : r.data()) v = 2.0 * t;
        pred.set_snapshot(t, p);
        ref.set_snapshot(t, r);
    }
    const std::vector<Trajectory> ps{pred};
    const std::vector<Trajectory> rs{ref};
    const auto report = rollout_metrics(ps, rs, metric_by_name("mean_nRMSE"));
    ASSERT_EQ(report.losses.size(), 3u);
    for (double l : report.losses) EXPECT_NEAR(l, 0.5, 1e-15);
    EXPECT_NEAR(report.aggregate, 0.5, 1e-15);
}

TEST(Metrics, DescriptorValidation) {
    for (const auto& name : metric_names()) EXPECT_NO_THROW(metric_by_name(name).validate()) << name;
    EXPECT_THROW((void)metric_by_name("mean_bogus"), ConfigError);
    MetricDescriptor bad;
    bad.k_high = 3.0;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = metric_by_name("mean_fourier_MSE");
    bad.k_low = 5.0;
    bad.k_high = 2.0;
    EXPECT_THROW(bad.validate(), ConfigError);
    bad = MetricDescriptor{};
    bad.inner_exponent = 0.0;
    EXPECT_THROW(bad.validate(), ConfigError);
}
