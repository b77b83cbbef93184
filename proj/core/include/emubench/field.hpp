#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace emubench {

using Complex = std::complex<double>;

/// Uniform periodic Cartesian grid on (0, L)^D with N points per axis. The
/// left boundary is a degree of freedom, the right one is excluded.
struct Grid {
    int num_dims = 1;
    int num_points = 16;
    double extent = 1.0;

    Grid() = default;
    Grid(int dims, int points, double domain_extent = 1.0);

    /// N^D
    [[nodiscard]] std::size_t spatial_size() const noexcept;
    /// N^(D-1) * (N/2 + 1), the real-FFT half spectrum of one channel.
    [[nodiscard]] std::size_t spectral_size() const noexcept;
    /// Per-axis extent of the half spectrum; the last axis is halved.
    [[nodiscard]] std::vector<int> spectral_shape() const;
    [[nodiscard]] std::vector<int> spatial_shape() const;
    [[nodiscard]] double spacing() const noexcept { return extent / num_points; }

    /// Grid point coordinate along one axis.
    [[nodiscard]] double coordinate(int index) const noexcept { return spacing() * index; }

    friend bool operator==(const Grid&, const Grid&) = default;
};

/// Real multi-channel state of shape (C, N, [N, [N]]) in C order.
class SpatialField {
public:
    SpatialField() = default;
    SpatialField(const Grid& grid, int channels);
    SpatialField(const Grid& grid, int channels, std::vector<double> data);

    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
    [[nodiscard]] int channels() const noexcept { return channels_; }
    [[nodiscard]] std::size_t channel_size() const noexcept { return grid_.spatial_size(); }

    [[nodiscard]] std::span<double> data() noexcept { return data_; }
    [[nodiscard]] std::span<const double> data() const noexcept { return data_; }
    [[nodiscard]] std::span<double> channel(int c) noexcept;
    [[nodiscard]] std::span<const double> channel(int c) const noexcept;

    [[nodiscard]] bool all_finite() const noexcept;
    [[nodiscard]] double max_abs() const noexcept;

    SpatialField& operator+=(const SpatialField& other);
    SpatialField& operator-=(const SpatialField& other);
    SpatialField& operator*=(double scale) noexcept;

private:
    Grid grid_;
    int channels_ = 0;
    std::vector<double> data_;
};

SpatialField operator+(SpatialField lhs, const SpatialField& rhs);
SpatialField operator-(SpatialField lhs, const SpatialField& rhs);
SpatialField operator*(double scale, SpatialField field);

/// Complex half-spectrum coefficients of shape (C, N, [N,] N/2+1).
class SpectralField {
public:
    SpectralField() = default;
    SpectralField(const Grid& grid, int channels);

    [[nodiscard]] const Grid& grid() const noexcept { return grid_; }
    [[nodiscard]] int channels() const noexcept { return channels_; }
    [[nodiscard]] std::size_t channel_size() const noexcept { return grid_.spectral_size(); }

    [[nodiscard]] std::span<Complex> data() noexcept { return data_; }
    [[nodiscard]] std::span<const Complex> data() const noexcept { return data_; }
    [[nodiscard]] std::span<Complex> channel(int c) noexcept;
    [[nodiscard]] std::span<const Complex> channel(int c) const noexcept;

    [[nodiscard]] bool all_finite() const noexcept;

private:
    Grid grid_;
    int channels_ = 0;
    std::vector<Complex> data_;
};

void require_same_shape(const SpatialField& a, const SpatialField& b);
void require_same_shape(const SpectralField& a, const SpectralField& b);

}  // namespace emubench
