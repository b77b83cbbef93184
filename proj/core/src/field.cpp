#include "emubench/field.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "emubench/error.hpp"

namespace emubench {

Grid::Grid(int dims, int points, double domain_extent)
    : num_dims(dims), num_points(points), extent(domain_extent) {
    if (dims < 1 || dims > 3) {
        throw ConfigError("grid: num_dims must be 1, 2 or 3, got " + std::to_string(dims));
    }
    if (points < 4 || points % 2 != 0) {
        throw ConfigError("grid: num_points must be even and >= 4, got " + std::to_string(points));
    }
    if (!(domain_extent > 0.0) || !std::isfinite(domain_extent)) {
        throw ConfigError("grid: domain extent must be positive");
    }
}

std::size_t Grid::spatial_size() const noexcept {
    std::size_t n = 1;
    for (int d = 0; d < num_dims; ++d) n *= static_cast<std::size_t>(num_points);
    return n;
}

std::size_t Grid::spectral_size() const noexcept {
    std::size_t n = static_cast<std::size_t>(num_points / 2 + 1);
    for (int d = 0; d + 1 < num_dims; ++d) n *= static_cast<std::size_t>(num_points);
    return n;
}

std::vector<int> Grid::spectral_shape() const {
    std::vector<int> shape(static_cast<std::size_t>(num_dims), num_points);
    shape.back() = num_points / 2 + 1;
    return shape;
}

std::vector<int> Grid::spatial_shape() const {
    return std::vector<int>(static_cast<std::size_t>(num_dims), num_points);
}

SpatialField::SpatialField(const Grid& grid, int channels)
    : grid_(grid), channels_(channels), data_(static_cast<std::size_t>(channels) * grid.spatial_size(), 0.0) {
    if (channels < 1) throw ShapeError("spatial field: channels must be >= 1");
}

SpatialField::SpatialField(const Grid& grid, int channels, std::vector<double> data)
    : grid_(grid), channels_(channels), data_(std::move(data)) {
    if (channels < 1) throw ShapeError("spatial field: channels must be >= 1");
    if (data_.size() != static_cast<std::size_t>(channels) * grid.spatial_size()) {
        throw ShapeError("spatial field: data length " + std::to_string(data_.size()) +
                         " does not match shape");
    }
}

std::span<double> SpatialField::channel(int c) noexcept {
    return std::span<double>(data_).subspan(static_cast<std::size_t>(c) * channel_size(), channel_size());
}

std::span<const double> SpatialField::channel(int c) const noexcept {
    return std::span<const double>(data_).subspan(static_cast<std::size_t>(c) * channel_size(), channel_size());
}

bool SpatialField::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(), [](double v) { return std::isfinite(v); });
}

double SpatialField::max_abs() const noexcept {
    double m = 0.0;
    for (double v : data_) m = std::max(m, std::abs(v));
    return m;
}

SpatialField& SpatialField::operator+=(const SpatialField& other) {
    require_same_shape(*this, other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] += other.data_[i];
    return *this;
}

SpatialField& SpatialField::operator-=(const SpatialField& other) {
    require_same_shape(*this, other);
    for (std::size_t i = 0; i < data_.size(); ++i) data_[i] -= other.data_[i];
    return *this;
}

SpatialField& SpatialField::operator*=(double scale) noexcept {
    for (double& v : data_) v *= scale;
    return *this;
}

SpatialField operator+(SpatialField lhs, const SpatialField& rhs) { return lhs += rhs; }
SpatialField operator-(SpatialField lhs, const SpatialField& rhs) { return lhs -= rhs; }
SpatialField operator*(double scale, SpatialField field) { return field *= scale; }

SpectralField::SpectralField(const Grid& grid, int channels)
    : grid_(grid), channels_(channels), data_(static_cast<std::size_t>(channels) * grid.spectral_size()) {
    if (channels < 1) throw ShapeError("spectral field: channels must be >= 1");
}

std::span<Complex> SpectralField::channel(int c) noexcept {
    return std::span<Complex>(data_).subspan(static_cast<std::size_t>(c) * channel_size(), channel_size());
}

std::span<const Complex> SpectralField::channel(int c) const noexcept {
    return std::span<const Complex>(data_).subspan(static_cast<std::size_t>(c) * channel_size(), channel_size());
}

bool SpectralField::all_finite() const noexcept {
    return std::all_of(data_.begin(), data_.end(),
                       [](const Complex& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

void require_same_shape(const SpatialField& a, const SpatialField& b) {
    if (a.grid() != b.grid() || a.channels() != b.channels()) {
        throw ShapeError("spatial fields differ in grid or channel count");
    }
}

void require_same_shape(const SpectralField& a, const SpectralField& b) {
    if (a.grid() != b.grid() || a.channels() != b.channels()) {
        throw ShapeError("spectral fields differ in grid or channel count");
    }
}

}  // namespace emubench
