#pragma once

// Real-FFT contract, wavenumber grids, spectral derivative diagonals and
// dealiasing masks.
//
// Conventions used throughout the library:
//   * forward transform is unnormalized, the inverse carries 1/N^D;
//   * the LAST spatial axis is halved (N/2 + 1 bins), the other axes use the
//     signed ordering 0, 1, ..., N/2-1, -N/2, ..., -1;
//   * odd-order derivative diagonals are zero on the Nyquist bins of the
//     differentiated axis so that real fields stay real.

#include <cstdint>
#include <span>
#include <vector>

#include "emubench/field.hpp"

namespace emubench {

/// Unnormalized forward real FFT of every channel over all spatial axes.
/// Throws NumericError("non-finite field") for NaN/Inf input.
[[nodiscard]] SpectralField forward_transform(const SpatialField& field);

/// Inverse real FFT including the 1/N^D normalization.
[[nodiscard]] SpatialField inverse_transform(const SpectralField& field);

namespace detail {
// Hot-path variants without the finiteness check. `out` must already have the
// matching shape.
void forward_transform_into(const SpatialField& field, SpectralField& out);
void inverse_transform_into(const SpectralField& field, SpatialField& out);
void forward_channel(const Grid& grid, std::span<const double> in, std::span<Complex> out);
void inverse_channel(const Grid& grid, std::span<const Complex> in, std::span<double> out);
}  // namespace detail

/// Integer wavenumbers of the half-spectrum layout, one array per axis,
/// already broadcast to the flat spectral index of a single channel.
struct WavenumberGrid {
    Grid grid;
    /// axis_values[d] lists the 1D wavenumbers of axis d (length N, or N/2+1
    /// for the last axis).
    std::vector<std::vector<int>> axis_values;
    /// flat[d][i] is the wavenumber along axis d of spectral bin i.
    std::vector<std::vector<int>> flat;

    /// Scaled wavenumber 2*pi*k/L along `axis` for spectral bin `index`.
    [[nodiscard]] double scaled(int axis, std::size_t index) const;
    [[nodiscard]] bool is_nyquist(int axis, std::size_t index) const {
        const int k = flat[static_cast<std::size_t>(axis)][index];
        return k == grid.num_points / 2 || k == -grid.num_points / 2;
    }
};

[[nodiscard]] WavenumberGrid build_wavenumber_grid(const Grid& grid);

/// Elementwise complex multiplier in Fourier space. `channels` is either 1
/// (broadcast to every channel of a field) or the channel count of the field.
class DiagonalLinearOperator {
public:
    DiagonalLinearOperator() = default;
    DiagonalLinearOperator(const Grid& grid, int channels);
    DiagonalLinearOperator(const Grid& grid, std::vector<Complex> values);

    [[nodiscard]] static DiagonalLinearOperator constant(const Grid& grid, Complex value);
    /// Stacks single-channel operators into one multi-channel operator.
    [[nodiscard]] static DiagonalLinearOperator stack(std::span<const DiagonalLinearOperator> parts);

    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
    [[nodiscard]] int channels() const noexcept { return channels_; }
    [[nodiscard]] std::span<const Complex> values() const noexcept { return values_; }
    [[nodiscard]] std::span<Complex> values() noexcept { return values_; }
    /// Values acting on channel `c` of a field (handles broadcasting).
    [[nodiscard]] std::span<const Complex> channel(int c) const noexcept;

    /// Multiplies `field` in place.
    void apply_inplace(SpectralField& field) const;
    [[nodiscard]] SpectralField apply(SpectralField field) const;

    DiagonalLinearOperator& operator+=(const DiagonalLinearOperator& other);
    DiagonalLinearOperator& operator*=(Complex scale) noexcept;

private:
    Grid grid_;
    int channels_ = 0;
    std::vector<Complex> values_;
};

DiagonalLinearOperator operator+(DiagonalLinearOperator lhs, const DiagonalLinearOperator& rhs);
DiagonalLinearOperator operator*(Complex scale, DiagonalLinearOperator op);
/// Elementwise product of two single-channel operators.
DiagonalLinearOperator operator*(const DiagonalLinearOperator& lhs, const DiagonalLinearOperator& rhs);

/// (i * 2*pi*k_axis / L)^order. Odd orders are zeroed on the Nyquist bins of
/// `axis`.
[[nodiscard]] DiagonalLinearOperator derivative_diagonal(const Grid& grid, int order, int axis);

/// Exact rational keep fraction for the dealiasing cutoff.
struct KeepFraction {
    int numerator = 2;
    int denominator = 3;
};

/// Tensor-product mask retaining |k_axis| <= floor(fraction * N/2) on every axis.
class DealiasMask {
public:
    DealiasMask() = default;
    DealiasMask(const Grid& grid, KeepFraction fraction);

    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
    [[nodiscard]] int cutoff() const noexcept { return cutoff_; }
    [[nodiscard]] std::span<const std::uint8_t> retained() const noexcept { return retained_; }
    [[nodiscard]] bool keeps(std::size_t index) const noexcept { return retained_[index] != 0; }

    void apply_inplace(SpectralField& field) const;
    [[nodiscard]] SpectralField apply(SpectralField field) const;

private:
    Grid grid_;
    int cutoff_ = 0;
    std::vector<std::uint8_t> retained_;
};

[[nodiscard]] DealiasMask dealias_mask(const Grid& grid, KeepFraction fraction = {});

/// Half-spectrum multiplicity of each bin: 1 for self-conjugate bins (k_last
/// equal to 0 or N/2), 2 otherwise. Weighted sums over the half spectrum then
/// equal sums over the full spectrum.
[[nodiscard]] std::vector<double> conjugate_weights(const Grid& grid);

}  // namespace emubench
