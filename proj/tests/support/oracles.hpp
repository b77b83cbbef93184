#pragma once

// Independent reference implementations and generators shared by the test
// suites. Nothing here calls into FFTW or the library's spectral code.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "emubench/field.hpp"

namespace oracle {

using Complex = std::complex<double>;

/// Naive 1D DFT, unnormalized, full spectrum.
inline std::vector<Complex> dft(const std::vector<double>& x) {
    const std::size_t n = x.size();
    std::vector<Complex> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        Complex sum = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            sum += x[j] * std::polar(1.0, -2.0 * std::numbers::pi * double(k * j % n) / double(n));
        }
        out[k] = sum;
    }
    return out;
}

/// Hand-rolled generator for property tests.
class Gen {
public:
    explicit Gen(std::uint32_t seed) : engine_(seed) {}

    double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(engine_); }
    int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(engine_); }
    bool coin() { return integer(0, 1) == 1; }

    /// Sum of sines and cosines with integer wavenumbers 1..cutoff per axis
    /// (1D) or a random superposition of separable modes (multi-D).
    emubench::SpatialField bandlimited(const emubench::Grid& grid, int channels, int cutoff) {
        emubench::SpatialField f(grid, channels);
        const int n = grid.num_points;
        const int terms = 6;
        for (int c = 0; c < channels; ++c) {
            auto ch = f.channel(c);
            for (int t = 0; t < terms; ++t) {
                std::vector<int> k(static_cast<std::size_t>(grid.num_dims));
                for (auto& kd : k) kd = integer(-cutoff, cutoff);
                const double amp = uniform(-1.0, 1.0);
                const double phase = uniform(0.0, 2.0 * std::numbers::pi);
                for (std::size_t i = 0; i < ch.size(); ++i) {
                    std::size_t rest = i;
                    double arg = phase;
                    for (int d = grid.num_dims - 1; d >= 0; --d) {
                        const int idx = static_cast<int>(rest % static_cast<std::size_t>(n));
                        rest /= static_cast<std::size_t>(n);
                        arg += 2.0 * std::numbers::pi * k[static_cast<std::size_t>(d)] * idx / n;
                    }
                    ch[i] += amp * std::cos(arg);
                }
            }
        }
        return f;
    }

    /// White noise field, every mode populated.
    emubench::SpatialField noise(const emubench::Grid& grid, int channels) {
        emubench::SpatialField f(grid, channels);
        for (double& v : f.data()) v = uniform(-1.0, 1.0);
        return f;
    }

private:
    std::mt19937 engine_;
};

/// 1D field from a callable of x on the grid.
template <typename F>
emubench::SpatialField sample_1d(const emubench::Grid& grid, F&& fn) {
    emubench::SpatialField f(grid, 1);
    auto d = f.data();
    for (int i = 0; i < grid.num_points; ++i) d[static_cast<std::size_t>(i)] = fn(grid.coordinate(i));
    return f;
}

inline double max_abs_diff(std::span<const double> a, std::span<const double> b) {
    double m = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a[i] - b[i]));
    return m;
}

}  // namespace oracle
