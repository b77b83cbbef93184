#include <gtest/gtest.h>

#include <cmath>
#include <numbers>

#include "emubench/error.hpp"
#include "emubench/etdrk.hpp"
#include "emubench/operators.hpp"
#include "oracles.hpp"

using namespace emubench;

namespace {

// Truncated Taylor series around z = 0, accurate for |z| << 1.
Complex taylor_phi1(Complex z) { return 1.0 + z / 2.0 + z * z / 6.0 + z * z * z / 24.0; }
Complex taylor_phi2(Complex z) { return 0.5 + z / 6.0 + z * z / 24.0 + z * z * z / 120.0; }

// Constant fields reduce u_t = lambda u + u^2 to a scalar Bernoulli ODE with
// the closed-form solution below.
double bernoulli_exact(double lambda, double u0, double t) {
    const double e = std::exp(lambda * t);
    return lambda * u0 * e / (lambda + u0 * (1.0 - e));
}

Stepper bernoulli_stepper(double lambda, double dt, int order) {
    const Grid grid(1, 8);
    auto nonlinear = build_nonlinear(nl::Polynomial{{0.0, 0.0, 1.0}}, grid, dealias_mask(grid));
    return Stepper(DiagonalLinearOperator::constant(grid, lambda), nonlinear, dt, order);
}

double bernoulli_error(double lambda, double u0, double t_end, int steps, int order) {
    const Stepper stepper = bernoulli_stepper(lambda, t_end / steps, order);
    SpatialField u(stepper.grid(), 1);
    for (double& v : u.data()) v = u0;
    for (int s = 0; s < steps; ++s) u = stepper.step(u);
    return std::abs(u.data()[0] - bernoulli_exact(lambda, u0, t_end));
}

}  // namespace

TEST(Etdrk, ContourPhiMatchesTaylorSeriesNearZero) {
    for (const Complex z : {Complex(1e-8), Complex(-1e-6, 1e-6), Complex(1e-3)}) {
        EXPECT_LT(std::abs(contour_phi1(z) - taylor_phi1(z)), 1e-13);
        EXPECT_LT(std::abs(contour_phi2(z) - taylor_phi2(z)), 1e-13);
    }
}

TEST(Etdrk, ContourPhiMatchesDirectFormulaAwayFromZero) {
    for (const Complex z : {Complex(-2.0), Complex(-30.0), Complex(0.5, 3.0)}) {
        EXPECT_LT(std::abs(contour_phi1(z) - (std::exp(z) - 1.0) / z), 1e-12 * std::abs((std::exp(z) - 1.0) / z));
    }
    EXPECT_NEAR(contour_phi1(Complex(-100.0)).real(), 0.01, 1e-14);
}

TEST(Etdrk, EndWeightsReduceToRungeKuttaWeightsAtZero) {
    const Complex zero[] = {Complex(0.0)};
    const auto c = phi_coefficients(zero, 4);
    EXPECT_NEAR(c.f1[0].real(), 1.0 / 6.0, 1e-14);
    EXPECT_NEAR(c.f2[0].real(), 1.0 / 6.0, 1e-14);
    EXPECT_NEAR(c.f3[0].real(), 1.0 / 6.0, 1e-14);
    EXPECT_NEAR(c.phi1_half[0].real(), 1.0, 1e-14);
    EXPECT_EQ(c.exp_half[0], Complex(1.0));
}

TEST(Etdrk, CoefficientsOnlyForRequestedOrder) {
    const Complex z[] = {Complex(-1.0)};
    const auto c0 = phi_coefficients(z, 0);
    EXPECT_TRUE(c0.phi1.empty());
    const auto c2 = phi_coefficients(z, 2);
    EXPECT_FALSE(c2.phi2.empty());
    EXPECT_TRUE(c2.f1.empty());
    EXPECT_THROW((void)phi_coefficients(z, 5), ConfigError);
    EXPECT_THROW((void)phi_coefficients(z, 2, ContourOptions{1.0, 4}), ConfigError);
}

TEST(Etdrk, LinearStepIsExactPerMode) {
    const Grid grid(1, 32);
    const double nu = 0.01;
    auto lin = DiagonalLinearOperator(grid, 1);
    const auto wn = build_wavenumber_grid(grid);
    for (std::size_t i = 0; i < grid.spectral_size(); ++i) lin.values()[i] = -nu * std::pow(wn.scaled(0, i), 2);
    const Stepper stepper(lin, std::nullopt, 0.3, 4);
    EXPECT_EQ(stepper.order(), 0);
    const double kappa = 2.0 * std::numbers::pi * 3.0;
    const auto u = oracle::sample_1d(grid, [&](double x) { return std::cos(kappa * x); });
    const auto next = stepper.step(u);
    const double decay = std::exp(-nu * kappa * kappa * 0.3);
    const auto expected = oracle::sample_1d(grid, [&](double x) { return decay * std::cos(kappa * x); });
    EXPECT_LT(oracle::max_abs_diff(next.data(), expected.data()), 1e-14);
}

TEST(Etdrk, EveryOrderConvergesToTheBernoulliSolution) {
    for (int order = 1; order <= 4; ++order) {
        const double coarse = bernoulli_error(-1.0, 0.5, 1.0, 8, order);
        const double fine = bernoulli_error(-1.0, 0.5, 1.0, 16, order);
        const double slope = std::log2(coarse / fine);
        EXPECT_NEAR(slope, order, 0.3) << "order " << order;
    }
}

TEST(Etdrk, SubstepsSplitTheStepEvenly) {
    const Stepper one = bernoulli_stepper(-1.0, 0.5, 2);
    const Grid grid(1, 8);
    auto nonlinear = build_nonlinear(nl::Polynomial{{0.0, 0.0, 1.0}}, grid, dealias_mask(grid));
    const Stepper two(DiagonalLinearOperator::constant(grid, -1.0), nonlinear, 1.0, 2, 2);
    SpatialField u(grid, 1);
    for (double& v : u.data()) v = 0.5;
    const auto a = one.step(one.step(u));
    const auto b = two.step(u);
    EXPECT_LT(oracle::max_abs_diff(a.data(), b.data()), 1e-15);
}

TEST(Etdrk, BlowUpRaisesDivergenceWithLastValidStep) {
    const Stepper stepper = bernoulli_stepper(0.0, 10.0, 1);
    SpatialField u(stepper.grid(), 1);
    for (double& v : u.data()) v = 2.0;
    try {
        (void)rollout(stepper, u, 50);
        FAIL() << "expected divergence";
    } catch (const DivergenceError& e) {
        EXPECT_GE(e.last_valid_step(), 1);
        EXPECT_LT(e.last_valid_step(), 50);
    }
}

TEST(Etdrk, RolloutSnapshotsAreReproducibleFromStep) {
    const Stepper stepper = bernoulli_stepper(-0.5, 0.1, 4);
    oracle::Gen gen(5);
    const SpatialField ic = 0.05 * gen.bandlimited(stepper.grid(), 1, 2);
    const Trajectory traj = rollout(stepper, ic, 6, 2);
    EXPECT_EQ(traj.num_snapshots(), 7);
    for (int t = 0; t < 6; ++t) {
        const auto next = stepper.step(traj.snapshot(t));
        EXPECT_EQ(oracle::max_abs_diff(next.data(), traj.snapshot_data(t + 1)), 0.0);
    }
}

TEST(Etdrk, InvalidConfigurationsAreRejected) {
    const Grid grid(1, 8);
    const auto lin = DiagonalLinearOperator::constant(grid, -1.0);
    EXPECT_THROW(Stepper(lin, std::nullopt, 0.0, 1), ConfigError);
    EXPECT_THROW(Stepper(lin, std::nullopt, 1.0, 5), ConfigError);
    EXPECT_THROW(Stepper(lin, std::nullopt, 1.0, 1, 0), ConfigError);
    const Stepper ok(lin, std::nullopt, 1.0, 1);
    EXPECT_THROW((void)ok.step(SpatialField(Grid(1, 16), 1)), ShapeError);
    EXPECT_THROW((void)rollout(ok, SpatialField(grid, 1), 0), ConfigError);
}
