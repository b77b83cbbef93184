#pragma once

// Exponential time differencing Runge-Kutta steppers (orders 0 to 4) for
//   u_t = L u + N(u)
// with L diagonal in Fourier space and N evaluated pseudo-spectrally.

#include <functional>
#include <optional>
#include <span>
#include <vector>

#include "emubench/field.hpp"
#include "emubench/spectral.hpp"

namespace emubench {

/// Spectral nonlinearity N(u_hat). Implementations mask their own input
/// before forming products and must be safe to call concurrently.
using NonlinearFunction = std::function<SpectralField(const SpectralField&)>;

/// Dimensionless per-mode coefficients as functions of z = L_hat * h.
///   phi1(z)  = (e^z - 1) / z
///   phi2(z)  = (e^z - 1 - z) / z^2
///   f1..f3   = the three ETDRK3/ETDRK4 end-of-step weights
/// The `_half` variant is phi1 evaluated at z/2. Arrays not needed for the
/// requested order are left empty.
struct EtdrkCoefficients {
    int order = 0;
    std::vector<Complex> exp_full;
    std::vector<Complex> exp_half;
    std::vector<Complex> phi1;
    std::vector<Complex> phi2;
    std::vector<Complex> phi1_half;
    std::vector<Complex> f1;
    std::vector<Complex> f2;
    std::vector<Complex> f3;
};

struct ContourOptions {
    double radius = 1.0;
    int points = 16;
};

/// Evaluates the coefficients by averaging the direct formulas over
/// z + r e^{i theta_j}, theta_j = 2 pi (j + 1/2) / M. The exponentials
/// themselves are evaluated directly.
[[nodiscard]] EtdrkCoefficients phi_coefficients(std::span<const Complex> z, int order,
                                                 ContourOptions contour = {});

/// Scalar contour averages, exposed for testing.
[[nodiscard]] Complex contour_phi1(Complex z, ContourOptions contour = {});
[[nodiscard]] Complex contour_phi2(Complex z, ContourOptions contour = {});

class Stepper {
public:
    Stepper(DiagonalLinearOperator linear, std::optional<NonlinearFunction> nonlinear, double dt, int order,
            int substeps = 1, ContourOptions contour = {});

    [[nodiscard]] const Grid& grid() const noexcept { return linear_.grid(); }
    [[nodiscard]] const DiagonalLinearOperator& linear() const noexcept { return linear_; }
    [[nodiscard]] double dt() const noexcept { return dt_; }
    [[nodiscard]] int order() const noexcept { return order_; }
    [[nodiscard]] int substeps() const noexcept { return substeps_; }
    [[nodiscard]] bool has_nonlinear() const noexcept { return nonlinear_.has_value(); }
    [[nodiscard]] const EtdrkCoefficients& coefficients() const noexcept { return coeffs_; }

    /// One public step of size dt in Fourier space (q internal substeps).
    /// No finiteness check.
    [[nodiscard]] SpectralField advance(SpectralField state) const;

    /// One public step in state space. Throws DivergenceError if the result
    /// is not finite.
    [[nodiscard]] SpatialField step(const SpatialField& state) const;

private:
    void substep(SpectralField& u) const;
    [[nodiscard]] SpectralField eval(const SpectralField& u) const;

    DiagonalLinearOperator linear_;
    std::optional<NonlinearFunction> nonlinear_;
    double dt_;
    int order_;
    int substeps_;
    EtdrkCoefficients coeffs_;
};

[[nodiscard]] Stepper make_stepper(DiagonalLinearOperator linear, std::optional<NonlinearFunction> nonlinear,
                                   double dt, int order, int substeps = 1, ContourOptions contour = {});

[[nodiscard]] inline SpatialField step(const Stepper& stepper, const SpatialField& state) {
    return stepper.step(state);
}

/// Snapshots stored contiguously as (T+1, C, N, [N, [N]]).
class Trajectory {
public:
    Trajectory() = default;
    Trajectory(const Grid& grid, int channels, int num_snapshots);

    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
    [[nodiscard]] int channels() const noexcept { return channels_; }
    [[nodiscard]] int num_snapshots() const noexcept { return num_snapshots_; }
    [[nodiscard]] std::size_t snapshot_size() const noexcept {
        return static_cast<std::size_t>(channels_) * grid_.spatial_size();
    }

    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
    [[nodiscard]] std::span<double> data() noexcept { return data_; }
    [[nodiscard]] std::span<const double> snapshot_data(int t) const noexcept;
    [[nodiscard]] SpatialField snapshot(int t) const;
    void set_snapshot(int t, const SpatialField& field);

private:
    Grid grid_;
    int channels_ = 0;
    int num_snapshots_ = 0;
    std::vector<double> data_;
};

/// Discards `warmup` steps, then records the state and `num_steps` further
/// steps. Divergence is reported with the index of the last finite snapshot
/// (negative while still in warmup).
[[nodiscard]] Trajectory rollout(const Stepper& stepper, const SpatialField& ic, int num_steps, int warmup = 0);

}  // namespace emubench
