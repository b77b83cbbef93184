#include "emubench/operators.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <numbers>
#include <string>
#include <type_traits>

#include "emubench/error.hpp"

namespace emubench {
namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::vector<std::vector<Complex>> first_derivatives(const Grid& grid) {
    std::vector<std::vector<Complex>> out;
    for (int d = 0; d < grid.num_dims; ++d) {
        const auto op = derivative_diagonal(grid, 1, d);
        out.emplace_back(op.values().begin(), op.values().end());
    }
    return out;
}

// Shared machinery for every nonlinearity: the masked input transformed to
// state space, and per-axis first-derivative diagonals.
struct Context {
    Grid grid;
    DealiasMask mask;
    std::vector<std::vector<Complex>> ddx;

    Context(const Grid& g, const DealiasMask& m) : grid(g), mask(m), ddx(first_derivatives(g)) {
        if (m.grid() != g) throw ShapeError("dealias mask grid does not match");
    }

    [[nodiscard]] std::size_t spectral() const { return grid.spectral_size(); }
    [[nodiscard]] std::size_t spatial() const { return grid.spatial_size(); }

    [[nodiscard]] std::vector<Complex> masked(std::span<const Complex> in) const {
        std::vector<Complex> out(in.begin(), in.end());
        for (std::size_t i = 0; i < out.size(); ++i) {
            if (!mask.keeps(i)) out[i] = 0.0;
        }
        return out;
    }

    [[nodiscard]] std::vector<double> to_state(std::span<const Complex> hat) const {
        std::vector<double> out(spatial());
        detail::inverse_channel(grid, hat, out);
        return out;
    }

    [[nodiscard]] std::vector<Complex> to_spectral(std::span<const double> u) const {
        std::vector<Complex> out(spectral());
        detail::forward_channel(grid, u, out);
        return out;
    }

    [[nodiscard]] std::vector<double> derivative_state(std::span<const Complex> hat, int axis) const {
        std::vector<Complex> tmp(hat.begin(), hat.end());
        const auto& op = ddx[static_cast<std::size_t>(axis)];
        for (std::size_t i = 0; i < tmp.size(); ++i) tmp[i] *= op[i];
        return to_state(tmp);
    }

    void require_channels(const SpectralField& f, int expected, const char* what) const {
        if (f.grid() != grid) throw ShapeError(std::string(what) + ": grid mismatch");
        if (f.channels() != expected) {
            throw ShapeError(std::string(what) + ": expected " + std::to_string(expected) + " channel(s), got " +
                             std::to_string(f.channels()));
        }
    }
};

// -b/2 sum_d d/dx_d (u^2) into `out`, accumulating.
void add_single_channel_convection(const Context& ctx, std::span<const double> u, double b,
                                   std::span<Complex> out) {
    std::vector<double> sq(u.size());
    for (std::size_t i = 0; i < u.size(); ++i) sq[i] = u[i] * u[i];
    const auto sq_hat = ctx.to_spectral(sq);
    for (std::size_t i = 0; i < out.size(); ++i) {
        Complex div = 0.0;
        for (const auto& d : ctx.ddx) div += d[i];
        out[i] += -0.5 * b * div * sq_hat[i];
    }
}

// -b/2 |grad u|^2 into `out`, accumulating.
void add_gradient_norm(const Context& ctx, std::span<const Complex> masked_hat, double b, bool zero_mean,
                       std::span<Complex> out) {
    std::vector<double> norm2(ctx.spatial(), 0.0);
    for (int d = 0; d < ctx.grid.num_dims; ++d) {
        const auto g = ctx.derivative_state(masked_hat, d);
        for (std::size_t i = 0; i < g.size(); ++i) norm2[i] += g[i] * g[i];
    }
    auto hat = ctx.to_spectral(norm2);
    if (zero_mean) hat[0] = 0.0;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += -0.5 * b * hat[i];
}

NonlinearFunction make_convection(std::shared_ptr<const Context> ctx, nl::Convection spec) {
    return [ctx, spec](const SpectralField& in) {
        const int dims = ctx->grid.num_dims;
        ctx->require_channels(in, dims, "convection");
        std::vector<std::vector<Complex>> hats;
        std::vector<std::vector<double>> u;
        for (int c = 0; c < dims; ++c) {
            hats.push_back(ctx->masked(in.channel(c)));
            u.push_back(ctx->to_state(hats.back()));
        }
        SpectralField out(in.grid(), dims);
        const std::size_t n = ctx->spatial();
        if (spec.conservative) {
            // Products u_c u_d for c <= d, each transformed once.
            for (int c = 0; c < dims; ++c) {
                for (int d = c; d < dims; ++d) {
                    std::vector<double> prod(n);
                    for (std::size_t i = 0; i < n; ++i) prod[i] = u[c][i] * u[d][i];
                    const auto prod_hat = ctx->to_spectral(prod);
                    auto oc = out.channel(c);
                    const auto& dd = ctx->ddx[static_cast<std::size_t>(d)];
                    for (std::size_t i = 0; i < oc.size(); ++i) oc[i] += -0.5 * spec.b * dd[i] * prod_hat[i];
                    if (d != c) {
                        auto od = out.channel(d);
                        const auto& dc = ctx->ddx[static_cast<std::size_t>(c)];
                        for (std::size_t i = 0; i < od.size(); ++i) od[i] += -0.5 * spec.b * dc[i] * prod_hat[i];
                    }
                }
            }
        } else {
            for (int c = 0; c < dims; ++c) {
                std::vector<double> adv(n, 0.0);
                for (int d = 0; d < dims; ++d) {
                    const auto g = ctx->derivative_state(hats[static_cast<std::size_t>(c)], d);
                    for (std::size_t i = 0; i < n; ++i) adv[i] += u[d][i] * g[i];
                }
                const auto adv_hat = ctx->to_spectral(adv);
                auto oc = out.channel(c);
                for (std::size_t i = 0; i < oc.size(); ++i) oc[i] = -spec.b * adv_hat[i];
            }
        }
        return out;
    };
}

NonlinearFunction make_single_channel_convection(std::shared_ptr<const Context> ctx,
                                                 nl::SingleChannelConvection spec) {
    return [ctx, spec](const SpectralField& in) {
        ctx->require_channels(in, 1, "single-channel convection");
        const auto u = ctx->to_state(ctx->masked(in.channel(0)));
        SpectralField out(in.grid(), 1);
        add_single_channel_convection(*ctx, u, spec.b, out.channel(0));
        return out;
    };
}

NonlinearFunction make_gradient_norm(std::shared_ptr<const Context> ctx, nl::GradientNorm spec) {
    return [ctx, spec](const SpectralField& in) {
        ctx->require_channels(in, 1, "gradient norm");
        SpectralField out(in.grid(), 1);
        add_gradient_norm(*ctx, ctx->masked(in.channel(0)), spec.b, spec.zero_mean, out.channel(0));
        return out;
    };
}

NonlinearFunction make_polynomial(std::shared_ptr<const Context> ctx, nl::Polynomial spec) {
    return [ctx, spec](const SpectralField& in) {
        if (in.grid() != ctx->grid) throw ShapeError("polynomial: grid mismatch");
        SpectralField out(in.grid(), in.channels());
        const auto& cs = spec.coefficients;
        for (int c = 0; c < in.channels(); ++c) {
            const auto u = ctx->to_state(ctx->masked(in.channel(c)));
            std::vector<double> p(u.size(), 0.0);
            // Horner from the highest power down.
            for (std::size_t j = cs.size(); j-- > 0;) {
                for (std::size_t i = 0; i < u.size(); ++i) p[i] = p[i] * u[i] + cs[j];
            }
            const auto hat = ctx->to_spectral(p);
            std::copy(hat.begin(), hat.end(), out.channel(c).begin());
        }
        return out;
    };
}

NonlinearFunction make_vorticity(std::shared_ptr<const Context> ctx, nl::VorticityConvection spec) {
    if (ctx->grid.num_dims != 2) throw ConfigError("vorticity convection requires a 2D grid");
    std::vector<Complex> forcing;
    if (spec.forcing_wavenumber > 0) {
        const Grid& g = ctx->grid;
        const int n = g.num_points;
        std::vector<double> f(g.spatial_size());
        const double kf = spec.forcing_wavenumber;
        for (int ix = 0; ix < n; ++ix) {
            for (int iy = 0; iy < n; ++iy) {
                const double y = g.coordinate(iy);
                f[static_cast<std::size_t>(ix) * n + iy] =
                    -spec.forcing_scale * kf * std::cos(kf * 2.0 * std::numbers::pi * y / g.extent);
            }
        }
        forcing = ctx->to_spectral(f);
    }
    const auto lap = laplacian_values(ctx->grid);
    return [ctx, spec, forcing = std::move(forcing), lap](const SpectralField& in) {
        ctx->require_channels(in, 1, "vorticity convection");
        const auto w_hat = ctx->masked(in.channel(0));
        // psi_hat = -w_hat / lap with the mean mode dropped.
        std::vector<Complex> psi_hat(w_hat.size());
        for (std::size_t i = 1; i < w_hat.size(); ++i) psi_hat[i] = -w_hat[i] / lap[i];
        const auto vx = ctx->derivative_state(psi_hat, 1);
        const auto vy = ctx->derivative_state(psi_hat, 0);
        const auto wx = ctx->derivative_state(w_hat, 0);
        const auto wy = ctx->derivative_state(w_hat, 1);
        std::vector<double> adv(vx.size());
        // v = (psi_y, -psi_x)
        for (std::size_t i = 0; i < adv.size(); ++i) adv[i] = vx[i] * wx[i] - vy[i] * wy[i];
        const auto adv_hat = ctx->to_spectral(adv);
        SpectralField out(in.grid(), 1);
        auto o = out.channel(0);
        for (std::size_t i = 0; i < o.size(); ++i) o[i] = -spec.b * adv_hat[i];
        if (!forcing.empty()) {
            for (std::size_t i = 0; i < o.size(); ++i) o[i] += forcing[i];
        }
        return out;
    };
}

NonlinearFunction make_general(std::shared_ptr<const Context> ctx, nl::General spec) {
    return [ctx, spec](const SpectralField& in) {
        ctx->require_channels(in, 1, "general nonlinearity");
        const auto hat = ctx->masked(in.channel(0));
        SpectralField out(in.grid(), 1);
        auto o = out.channel(0);
        if (spec.b0 != 0.0 || spec.b1 != 0.0) {
            const auto u = ctx->to_state(hat);
            if (spec.b0 != 0.0) {
                std::vector<double> sq(u.size());
                for (std::size_t i = 0; i < u.size(); ++i) sq[i] = spec.b0 * u[i] * u[i];
                const auto sq_hat = ctx->to_spectral(sq);
                for (std::size_t i = 0; i < o.size(); ++i) o[i] += sq_hat[i];
            }
            if (spec.b1 != 0.0) add_single_channel_convection(*ctx, u, spec.b1, o);
        }
        if (spec.b2 != 0.0) add_gradient_norm(*ctx, hat, spec.b2, true, o);
        return out;
    };
}

NonlinearFunction make_gray_scott(std::shared_ptr<const Context> ctx, nl::GrayScott spec) {
    return [ctx, spec](const SpectralField& in) {
        ctx->require_channels(in, 2, "gray-scott");
        const auto u0 = ctx->to_state(ctx->masked(in.channel(0)));
        const auto u1 = ctx->to_state(ctx->masked(in.channel(1)));
        std::vector<double> r(u0.size());
        for (std::size_t i = 0; i < r.size(); ++i) r[i] = u0[i] * u1[i] * u1[i];
        const auto r_hat = ctx->to_spectral(r);
        SpectralField out(in.grid(), 2);
        auto o0 = out.channel(0);
        auto o1 = out.channel(1);
        for (std::size_t i = 0; i < o0.size(); ++i) {
            o0[i] = -r_hat[i];
            o1[i] = r_hat[i];
        }
        // Constant feed: the unnormalized transform of f is f * N^D at k = 0.
        o0[0] += spec.feed * static_cast<double>(ctx->spatial());
        return out;
    };
}

// All principal minors nonnegative (up to roundoff) is equivalent to positive
// semi-definiteness for a symmetric matrix.
void require_symmetric_psd(const std::vector<double>& a, int n) {
    const auto at = [&](int i, int j) { return a[static_cast<std::size_t>(i * n + j)]; };
    double scale = 0.0;
    for (double v : a) scale = std::max(scale, std::abs(v));
    const double tol = 1e-12 * std::max(scale, 1e-300);
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (std::abs(at(i, j) - at(j, i)) > tol) throw ConfigError("anisotropic diffusion matrix must be symmetric");
        }
    }
    const auto fail = [] { throw ConfigError("anisotropic diffusion matrix must be positive semi-definite"); };
    for (int i = 0; i < n; ++i) {
        if (at(i, i) < -tol) fail();
    }
    for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j < n; ++j) {
            if (at(i, i) * at(j, j) - at(i, j) * at(j, i) < -tol * scale) fail();
        }
    }
    if (n == 3) {
        const double det = at(0, 0) * (at(1, 1) * at(2, 2) - at(1, 2) * at(2, 1)) -
                           at(0, 1) * (at(1, 0) * at(2, 2) - at(1, 2) * at(2, 0)) +
                           at(0, 2) * (at(1, 0) * at(2, 1) - at(1, 1) * at(2, 0));
        if (det < -tol * scale * scale) fail();
    }
}

}  // namespace

std::vector<double> laplacian_values(const Grid& grid) {
    const auto wg = build_wavenumber_grid(grid);
    std::vector<double> out(grid.spectral_size(), 0.0);
    for (std::size_t i = 0; i < out.size(); ++i) {
        for (int d = 0; d < grid.num_dims; ++d) {
            const double k = wg.scaled(d, i);
            out[i] -= k * k;
        }
    }
    return out;
}

DiagonalLinearOperator build_isotropic_linear(const IsotropicLinearCoefficients& coeffs, const Grid& grid) {
    DiagonalLinearOperator op = DiagonalLinearOperator::constant(grid, 0.0);
    for (std::size_t j = 0; j < coeffs.a.size(); ++j) {
        const double a = coeffs.a[j];
        if (!std::isfinite(a)) throw ConfigError("linear coefficient a_" + std::to_string(j) + " is not finite");
        if (a == 0.0) continue;
        if (j == 0) {
            op += DiagonalLinearOperator::constant(grid, a);
            continue;
        }
        for (int d = 0; d < grid.num_dims; ++d) op += Complex(a) * derivative_diagonal(grid, static_cast<int>(j), d);
    }
    return op;
}

DiagonalLinearOperator build_spatially_mixed_linear(const SpatialMixSpec& spec, const Grid& grid) {
    const int dims = grid.num_dims;
    const auto ik = [&](int d) { return derivative_diagonal(grid, 1, d); };
    const auto dd = [&](int d) { return derivative_diagonal(grid, 2, d); };
    const auto laplacian = [&] {
        auto op = dd(0);
        for (int d = 1; d < dims; ++d) op += dd(d);
        return op;
    };
    const auto require_length = [&](std::size_t n, const char* what) {
        if (n != static_cast<std::size_t>(dims)) {
            throw ShapeError(std::string(what) + ": expected " + std::to_string(dims) + " entries, got " +
                             std::to_string(n));
        }
    };

    return std::visit(
        overloaded{
            [&](const mix::UnbalancedAdvection& s) {
                require_length(s.velocity.size(), "unbalanced advection velocity");
                auto op = DiagonalLinearOperator::constant(grid, 0.0);
                for (int d = 0; d < dims; ++d) op += Complex(-s.velocity[static_cast<std::size_t>(d)]) * ik(d);
                return op;
            },
            [&](const mix::DiagonalDiffusion& s) {
                require_length(s.nu.size(), "diagonal diffusion");
                auto op = DiagonalLinearOperator::constant(grid, 0.0);
                for (int d = 0; d < dims; ++d) {
                    const double nu = s.nu[static_cast<std::size_t>(d)];
                    if (nu < 0.0) throw ConfigError("diagonal diffusion coefficients must be nonnegative");
                    op += Complex(nu) * dd(d);
                }
                return op;
            },
            [&](const mix::AnisotropicDiffusion& s) {
                if (s.matrix.size() != static_cast<std::size_t>(dims * dims)) {
                    throw ShapeError("anisotropic diffusion: matrix must be " + std::to_string(dims) + "x" +
                                     std::to_string(dims));
                }
                require_symmetric_psd(s.matrix, dims);
                auto op = DiagonalLinearOperator::constant(grid, 0.0);
                for (int d = 0; d < dims; ++d) {
                    for (int e = 0; e < dims; ++e) {
                        const double a = s.matrix[static_cast<std::size_t>(d * dims + e)];
                        if (a == 0.0) continue;
                        op += Complex(a) * (d == e ? dd(d) : ik(d) * ik(e));
                    }
                }
                return op;
            },
            [&](const mix::MixedDispersion& s) {
                auto sum_ik = ik(0);
                for (int d = 1; d < dims; ++d) sum_ik += ik(d);
                return Complex(s.xi) * (sum_ik * laplacian());
            },
            [&](const mix::MixedHyperdiffusion& s) {
                const auto lap = laplacian();
                return Complex(-s.zeta) * (lap * lap);
            },
        },
        spec);
}

int nonlinear_channels(const NonlinearSpec& spec, int num_dims) {
    return std::visit(overloaded{
                          [&](const nl::Convection&) { return num_dims; },
                          [](const nl::SingleChannelConvection&) { return 1; },
                          [](const nl::GradientNorm&) { return 1; },
                          [](const nl::Polynomial&) { return 0; },
                          [](const nl::VorticityConvection&) { return 1; },
                          [](const nl::General&) { return 1; },
                          [](const nl::GrayScott&) { return 2; },
                      },
                      spec);
}

NonlinearFunction build_nonlinear(const NonlinearSpec& spec, const Grid& grid, const DealiasMask& dealias) {
    auto ctx = std::make_shared<const Context>(grid, dealias);
    return std::visit(overloaded{
                          [&](const nl::Convection& s) { return make_convection(ctx, s); },
                          [&](const nl::SingleChannelConvection& s) { return make_single_channel_convection(ctx, s); },
                          [&](const nl::GradientNorm& s) { return make_gradient_norm(ctx, s); },
                          [&](const nl::Polynomial& s) { return make_polynomial(ctx, s); },
                          [&](const nl::VorticityConvection& s) { return make_vorticity(ctx, s); },
                          [&](const nl::General& s) { return make_general(ctx, s); },
                          [&](const nl::GrayScott& s) { return make_gray_scott(ctx, s); },
                      },
                      spec);
}

SpectralField inverse_laplacian(const SpectralField& field, const Grid& grid) {
    if (field.grid() != grid) throw ShapeError("inverse_laplacian: grid mismatch");
    const auto lap = laplacian_values(grid);
    SpectralField out(grid, field.channels());
    for (int c = 0; c < field.channels(); ++c) {
        const auto in = field.channel(c);
        auto o = out.channel(c);
        for (std::size_t i = 1; i < o.size(); ++i) o[i] = in[i] / lap[i];
    }
    return out;
}

}  // namespace emubench
