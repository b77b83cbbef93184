#include "emubench/spectral.hpp"

#include <fftw3.h>

#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <numbers>
#include <string>
#include <utility>

#include "emubench/error.hpp"

namespace emubench {
namespace {

// One r2c/c2r plan pair per (D, N). FFTW planning is not thread-safe, so the
// cache serializes plan creation; the new-array execute functions are safe to
// call concurrently on distinct arrays.
class PlanCache {
public:
    struct Plans {
        fftw_plan forward = nullptr;
        fftw_plan inverse = nullptr;
    };

    static PlanCache& instance() {
        static PlanCache cache;
        return cache;
    }

    Plans get(const Grid& grid) {
        const auto key = std::make_pair(grid.num_dims, grid.num_points);
        std::lock_guard lock(mutex_);
        if (auto it = plans_.find(key); it != plans_.end()) return it->second;

        std::vector<int> dims(static_cast<std::size_t>(grid.num_dims), grid.num_points);
        auto* real = fftw_alloc_real(grid.spatial_size());
        auto* cplx = fftw_alloc_complex(grid.spectral_size());
        const unsigned flags = FFTW_ESTIMATE | FFTW_UNALIGNED;
        Plans p;
        p.forward = fftw_plan_dft_r2c(grid.num_dims, dims.data(), real, cplx, flags);
        p.inverse = fftw_plan_dft_c2r(grid.num_dims, dims.data(), cplx, real, flags | FFTW_DESTROY_INPUT);
        fftw_free(real);
        fftw_free(cplx);
        if (p.forward == nullptr || p.inverse == nullptr) throw Error("fftw: failed to create plan");
        plans_.emplace(key, p);
        return p;
    }

    PlanCache(const PlanCache&) = delete;
    PlanCache& operator=(const PlanCache&) = delete;

private:
    PlanCache() = default;
    ~PlanCache() {
        for (auto& [key, p] : plans_) {
            fftw_destroy_plan(p.forward);
            fftw_destroy_plan(p.inverse);
        }
    }

    std::mutex mutex_;
    std::map<std::pair<int, int>, Plans> plans_;
};

}  // namespace

namespace detail {

void forward_channel(const Grid& grid, std::span<const double> in, std::span<Complex> out) {
    const auto plans = PlanCache::instance().get(grid);
    // r2c plans preserve their input by default.
    fftw_execute_dft_r2c(plans.forward, const_cast<double*>(in.data()),
                         reinterpret_cast<fftw_complex*>(out.data()));
}

void inverse_channel(const Grid& grid, std::span<const Complex> in, std::span<double> out) {
    const auto plans = PlanCache::instance().get(grid);
    std::vector<Complex> scratch(in.begin(), in.end());
    fftw_execute_dft_c2r(plans.inverse, reinterpret_cast<fftw_complex*>(scratch.data()), out.data());
    const double norm = 1.0 / static_cast<double>(grid.spatial_size());
    for (double& v : out) v *= norm;
}

void forward_transform_into(const SpatialField& field, SpectralField& out) {
    for (int c = 0; c < field.channels(); ++c) forward_channel(field.grid(), field.channel(c), out.channel(c));
}

void inverse_transform_into(const SpectralField& field, SpatialField& out) {
    for (int c = 0; c < field.channels(); ++c) inverse_channel(field.grid(), field.channel(c), out.channel(c));
}

}  // namespace detail

SpectralField forward_transform(const SpatialField& field) {
    if (!field.all_finite()) throw NumericError("non-finite field");
    SpectralField out(field.grid(), field.channels());
    detail::forward_transform_into(field, out);
    return out;
}

SpatialField inverse_transform(const SpectralField& field) {
    if (field.data().size() != static_cast<std::size_t>(field.channels()) * field.grid().spectral_size()) {
        throw ShapeError("inverse_transform: spectral data does not match half-spectrum layout");
    }
    SpatialField out(field.grid(), field.channels());
    detail::inverse_transform_into(field, out);
    return out;
}

double WavenumberGrid::scaled(int axis, std::size_t index) const {
    return 2.0 * std::numbers::pi * flat[static_cast<std::size_t>(axis)][index] / grid.extent;
}

WavenumberGrid build_wavenumber_grid(const Grid& grid) {
    const int n = grid.num_points;
    const auto dims = static_cast<std::size_t>(grid.num_dims);
    WavenumberGrid wg;
    wg.grid = grid;
    wg.axis_values.resize(dims);
    for (std::size_t d = 0; d < dims; ++d) {
        auto& values = wg.axis_values[d];
        if (d + 1 == dims) {
            for (int k = 0; k <= n / 2; ++k) values.push_back(k);
        } else {
            for (int i = 0; i < n; ++i) values.push_back(i < n / 2 ? i : i - n);
        }
    }

    const auto shape = grid.spectral_shape();
    const std::size_t size = grid.spectral_size();
    wg.flat.assign(dims, std::vector<int>(size));
    // C-order decomposition of the flat index.
    for (std::size_t idx = 0; idx < size; ++idx) {
        std::size_t rest = idx;
        for (std::size_t d = dims; d-- > 0;) {
            const auto extent = static_cast<std::size_t>(shape[d]);
            wg.flat[d][idx] = wg.axis_values[d][rest % extent];
            rest /= extent;
        }
    }
    return wg;
}

DiagonalLinearOperator::DiagonalLinearOperator(const Grid& grid, int channels)
    : grid_(grid), channels_(channels), values_(static_cast<std::size_t>(channels) * grid.spectral_size()) {
    if (channels < 1) throw ShapeError("linear operator: channels must be >= 1");
}

DiagonalLinearOperator::DiagonalLinearOperator(const Grid& grid, std::vector<Complex> values)
    : grid_(grid), values_(std::move(values)) {
    const std::size_t per = grid.spectral_size();
    if (values_.empty() || values_.size() % per != 0) {
        throw ShapeError("linear operator: value count is not a multiple of the spectral size");
    }
    channels_ = static_cast<int>(values_.size() / per);
}

DiagonalLinearOperator DiagonalLinearOperator::constant(const Grid& grid, Complex value) {
    return DiagonalLinearOperator(grid, std::vector<Complex>(grid.spectral_size(), value));
}

DiagonalLinearOperator DiagonalLinearOperator::stack(std::span<const DiagonalLinearOperator> parts) {
    if (parts.empty()) throw ShapeError("linear operator: cannot stack zero operators");
    std::vector<Complex> values;
    for (const auto& part : parts) {
        if (part.grid() != parts.front().grid()) throw ShapeError("linear operator: stacked grids differ");
        values.insert(values.end(), part.values_.begin(), part.values_.end());
    }
    return DiagonalLinearOperator(parts.front().grid(), std::move(values));
}

std::span<const Complex> DiagonalLinearOperator::channel(int c) const noexcept {
    const std::size_t per = grid_.spectral_size();
    const std::size_t offset = channels_ == 1 ? 0 : static_cast<std::size_t>(c) * per;
    return std::span<const Complex>(values_).subspan(offset, per);
}

void DiagonalLinearOperator::apply_inplace(SpectralField& field) const {
    if (field.grid() != grid_ || (channels_ != 1 && channels_ != field.channels())) {
        throw ShapeError("linear operator does not match field shape");
    }
    for (int c = 0; c < field.channels(); ++c) {
        auto out = field.channel(c);
        const auto op = channel(c);
        for (std::size_t i = 0; i < out.size(); ++i) out[i] *= op[i];
    }
}

SpectralField DiagonalLinearOperator::apply(SpectralField field) const {
    apply_inplace(field);
    return field;
}

DiagonalLinearOperator& DiagonalLinearOperator::operator+=(const DiagonalLinearOperator& other) {
    if (other.grid_ != grid_) throw ShapeError("linear operator: grids differ");
    if (other.channels_ == channels_) {
        for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
    } else if (other.channels_ == 1) {
        for (int c = 0; c < channels_; ++c) {
            const std::size_t per = grid_.spectral_size();
            for (std::size_t i = 0; i < per; ++i) values_[static_cast<std::size_t>(c) * per + i] += other.values_[i];
        }
    } else if (channels_ == 1) {
        DiagonalLinearOperator widened = other;
        widened += *this;
        *this = std::move(widened);
    } else {
        throw ShapeError("linear operator: channel counts differ");
    }
    return *this;
}

DiagonalLinearOperator& DiagonalLinearOperator::operator*=(Complex scale) noexcept {
    for (auto& v : values_) v *= scale;
    return *this;
}

DiagonalLinearOperator operator+(DiagonalLinearOperator lhs, const DiagonalLinearOperator& rhs) {
    return lhs += rhs;
}

DiagonalLinearOperator operator*(Complex scale, DiagonalLinearOperator op) { return op *= scale; }

DiagonalLinearOperator operator*(const DiagonalLinearOperator& lhs, const DiagonalLinearOperator& rhs) {
    if (lhs.grid() != rhs.grid() || lhs.channels() != 1 || rhs.channels() != 1) {
        throw ShapeError("linear operator: product requires single-channel operators on one grid");
    }
    std::vector<Complex> values(lhs.values().begin(), lhs.values().end());
    for (std::size_t i = 0; i < values.size(); ++i) values[i] *= rhs.values()[i];
    return DiagonalLinearOperator(lhs.grid(), std::move(values));
}

DiagonalLinearOperator derivative_diagonal(const Grid& grid, int order, int axis) {
    if (order < 1) throw ConfigError("derivative_diagonal: order must be >= 1");
    if (axis < 0 || axis >= grid.num_dims) throw ConfigError("derivative_diagonal: axis out of range");
    const auto wg = build_wavenumber_grid(grid);
    std::vector<Complex> values(grid.spectral_size());
    const Complex i_unit(0.0, 1.0);
    for (std::size_t idx = 0; idx < values.size(); ++idx) {
        if (order % 2 == 1 && wg.is_nyquist(axis, idx)) {
            values[idx] = 0.0;
            continue;
        }
        const Complex ik = i_unit * wg.scaled(axis, idx);
        Complex v = 1.0;
        for (int s = 0; s < order; ++s) v *= ik;
        values[idx] = v;
    }
    return DiagonalLinearOperator(grid, std::move(values));
}

DealiasMask::DealiasMask(const Grid& grid, KeepFraction fraction) : grid_(grid) {
    if (fraction.denominator <= 0 || fraction.numerator <= 0 || fraction.numerator > fraction.denominator) {
        throw ConfigError("dealias_mask: keep fraction must lie in (0, 1]");
    }
    // floor(num/den * N/2) in exact integer arithmetic.
    cutoff_ = (fraction.numerator * (grid.num_points / 2)) / fraction.denominator;
    const auto wg = build_wavenumber_grid(grid);
    retained_.assign(grid.spectral_size(), 1);
    for (std::size_t idx = 0; idx < retained_.size(); ++idx) {
        for (int d = 0; d < grid.num_dims; ++d) {
            if (std::abs(wg.flat[static_cast<std::size_t>(d)][idx]) > cutoff_) {
                retained_[idx] = 0;
                break;
            }
        }
    }
}

void DealiasMask::apply_inplace(SpectralField& field) const {
    if (field.grid() != grid_) throw ShapeError("dealias mask does not match field grid");
    for (int c = 0; c < field.channels(); ++c) {
        auto values = field.channel(c);
        for (std::size_t i = 0; i < values.size(); ++i) {
            if (retained_[i] == 0) values[i] = 0.0;
        }
    }
}

SpectralField DealiasMask::apply(SpectralField field) const {
    apply_inplace(field);
    return field;
}

DealiasMask dealias_mask(const Grid& grid, KeepFraction fraction) { return DealiasMask(grid, fraction); }

std::vector<double> conjugate_weights(const Grid& grid) {
    const auto last = static_cast<std::size_t>(grid.num_points / 2 + 1);
    std::vector<double> w(grid.spectral_size());
    for (std::size_t idx = 0; idx < w.size(); ++idx) {
        const std::size_t k = idx % last;
        w[idx] = (k == 0 || k + 1 == last) ? 1.0 : 2.0;
    }
    return w;
}

}  // namespace emubench
