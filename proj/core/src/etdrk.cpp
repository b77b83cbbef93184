#include "emubench/etdrk.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>

#include "emubench/error.hpp"

namespace emubench {
namespace {

// Direct formulas; only ever evaluated on contour points away from z = 0.
Complex direct_phi1(Complex z) { return (std::exp(z) - 1.0) / z; }
Complex direct_phi2(Complex z) { return (std::exp(z) - 1.0 - z) / (z * z); }
Complex direct_f1(Complex z) {
    const Complex ez = std::exp(z);
    return (-4.0 - z + ez * (4.0 - 3.0 * z + z * z)) / (z * z * z);
}
Complex direct_f2(Complex z) { return (2.0 + z + std::exp(z) * (-2.0 + z)) / (z * z * z); }
Complex direct_f3(Complex z) {
    return (-4.0 - 3.0 * z - z * z + std::exp(z) * (4.0 - z)) / (z * z * z);
}

template <typename F>
Complex contour_mean(F&& f, Complex z, const ContourOptions& contour) {
    Complex sum = 0.0;
    for (int j = 0; j < contour.points; ++j) {
        const double theta = 2.0 * std::numbers::pi * (j + 0.5) / contour.points;
        sum += f(z + contour.radius * std::polar(1.0, theta));
    }
    return sum / static_cast<double>(contour.points);
}

void validate_contour(const ContourOptions& contour) {
    if (contour.points < 8) throw ConfigError("contour needs at least 8 points");
    if (!(contour.radius > 0.0)) throw ConfigError("contour radius must be positive");
}

}  // namespace

Complex contour_phi1(Complex z, ContourOptions contour) {
    validate_contour(contour);
    return contour_mean(direct_phi1, z, contour);
}

Complex contour_phi2(Complex z, ContourOptions contour) {
    validate_contour(contour);
    return contour_mean(direct_phi2, z, contour);
}

EtdrkCoefficients phi_coefficients(std::span<const Complex> z, int order, ContourOptions contour) {
    if (order < 0 || order > 4) throw ConfigError("etdrk order must be in 0..4, got " + std::to_string(order));
    validate_contour(contour);
    EtdrkCoefficients c;
    c.order = order;
    const std::size_t n = z.size();
    c.exp_full.resize(n);
    for (std::size_t i = 0; i < n; ++i) c.exp_full[i] = std::exp(z[i]);
    if (order >= 1) {
        c.phi1.resize(n);
        for (std::size_t i = 0; i < n; ++i) c.phi1[i] = contour_mean(direct_phi1, z[i], contour);
    }
    if (order == 2) {
        c.phi2.resize(n);
        for (std::size_t i = 0; i < n; ++i) c.phi2[i] = contour_mean(direct_phi2, z[i], contour);
    }
    if (order >= 3) {
        c.exp_half.resize(n);
        c.phi1_half.resize(n);
        c.f1.resize(n);
        c.f2.resize(n);
        c.f3.resize(n);
        for (std::size_t i = 0; i < n; ++i) {
            c.exp_half[i] = std::exp(0.5 * z[i]);
            c.phi1_half[i] = contour_mean(direct_phi1, 0.5 * z[i], contour);
            c.f1[i] = contour_mean(direct_f1, z[i], contour);
            c.f2[i] = contour_mean(direct_f2, z[i], contour);
            c.f3[i] = contour_mean(direct_f3, z[i], contour);
        }
    }
    return c;
}

Stepper::Stepper(DiagonalLinearOperator linear, std::optional<NonlinearFunction> nonlinear, double dt, int order,
                 int substeps, ContourOptions contour)
    : linear_(std::move(linear)),
      nonlinear_(std::move(nonlinear)),
      dt_(dt),
      order_(order),
      substeps_(substeps) {
    if (!(dt > 0.0) || !std::isfinite(dt)) throw ConfigError("stepper: dt must be positive and finite");
    if (order < 0 || order > 4) throw ConfigError("stepper: order must be in 0..4");
    if (substeps < 1) throw ConfigError("stepper: substeps must be >= 1");
    if (linear_.channels() < 1) throw ConfigError("stepper: empty linear operator");
    if (!nonlinear_) order_ = 0;
    const double h = dt / substeps;
    std::vector<Complex> z(linear_.values().begin(), linear_.values().end());
    for (auto& v : z) v *= h;
    coeffs_ = phi_coefficients(z, order_, contour);
}

SpectralField Stepper::eval(const SpectralField& u) const { return (*nonlinear_)(u); }

void Stepper::substep(SpectralField& u) const {
    const double h = dt_ / substeps_;
    const std::size_t per = grid().spectral_size();
    const std::size_t total = u.data().size();
    const bool broadcast = linear_.channels() == 1;
    auto at = [&](std::size_t i) { return broadcast ? i % per : i; };
    const auto& c = coeffs_;

    if (order_ == 0) {
        auto d = u.data();
        for (std::size_t i = 0; i < total; ++i) d[i] *= c.exp_full[at(i)];
        return;
    }

    const SpectralField nu = eval(u);
    auto ud = u.data();
    const auto n0 = nu.data();

    if (order_ == 1) {
        for (std::size_t i = 0; i < total; ++i) {
            const std::size_t k = at(i);
            ud[i] = c.exp_full[k] * ud[i] + h * c.phi1[k] * n0[i];
        }
        return;
    }

    if (order_ == 2) {
        SpectralField star(u.grid(), u.channels());
        auto sd = star.data();
        for (std::size_t i = 0; i < total; ++i) {
            const std::size_t k = at(i);
            sd[i] = c.exp_full[k] * ud[i] + h * c.phi1[k] * n0[i];
        }
        const SpectralField nstar = eval(star);
        const auto n1 = nstar.data();
        for (std::size_t i = 0; i < total; ++i) ud[i] = sd[i] + h * c.phi2[at(i)] * (n1[i] - n0[i]);
        return;
    }

    SpectralField a(u.grid(), u.channels());
    auto ad = a.data();
    for (std::size_t i = 0; i < total; ++i) {
        const std::size_t k = at(i);
        ad[i] = c.exp_half[k] * ud[i] + 0.5 * h * c.phi1_half[k] * n0[i];
    }
    const SpectralField na = eval(a);
    const auto nad = na.data();

    if (order_ == 3) {
        SpectralField b(u.grid(), u.channels());
        auto bd = b.data();
        for (std::size_t i = 0; i < total; ++i) {
            const std::size_t k = at(i);
            bd[i] = c.exp_full[k] * ud[i] + h * c.phi1[k] * (2.0 * nad[i] - n0[i]);
        }
        const SpectralField nb = eval(b);
        const auto nbd = nb.data();
        for (std::size_t i = 0; i < total; ++i) {
            const std::size_t k = at(i);
            ud[i] = c.exp_full[k] * ud[i] + h * (c.f1[k] * n0[i] + 4.0 * c.f2[k] * nad[i] + c.f3[k] * nbd[i]);
        }
        return;
    }

    SpectralField b(u.grid(), u.channels());
    auto bd = b.data();
    for (std::size_t i = 0; i < total; ++i) {
        const std::size_t k = at(i);
        bd[i] = c.exp_half[k] * ud[i] + 0.5 * h * c.phi1_half[k] * nad[i];
    }
    const SpectralField nb = eval(b);
    const auto nbd = nb.data();
    SpectralField cc(u.grid(), u.channels());
    auto cd = cc.data();
    for (std::size_t i = 0; i < total; ++i) {
        const std::size_t k = at(i);
        cd[i] = c.exp_half[k] * ad[i] + 0.5 * h * c.phi1_half[k] * (2.0 * nbd[i] - n0[i]);
    }
    const SpectralField nc = eval(cc);
    const auto ncd = nc.data();
    for (std::size_t i = 0; i < total; ++i) {
        const std::size_t k = at(i);
        ud[i] = c.exp_full[k] * ud[i] +
                h * (c.f1[k] * n0[i] + 2.0 * c.f2[k] * (nad[i] + nbd[i]) + c.f3[k] * ncd[i]);
    }
}

SpectralField Stepper::advance(SpectralField state) const {
    if (state.grid() != grid() || (linear_.channels() != 1 && linear_.channels() != state.channels())) {
        throw ShapeError("stepper: state does not match the linear operator");
    }
    for (int s = 0; s < substeps_; ++s) substep(state);
    return state;
}

SpatialField Stepper::step(const SpatialField& state) const {
    if (state.grid() != grid()) throw ShapeError("stepper: state grid does not match");
    SpectralField hat(state.grid(), state.channels());
    detail::forward_transform_into(state, hat);
    hat = advance(std::move(hat));
    SpatialField out(state.grid(), state.channels());
    detail::inverse_transform_into(hat, out);
    if (!out.all_finite()) throw DivergenceError("trajectory diverged", 0);
    return out;
}

Stepper make_stepper(DiagonalLinearOperator linear, std::optional<NonlinearFunction> nonlinear, double dt, int order,
                     int substeps, ContourOptions contour) {
    return Stepper(std::move(linear), std::move(nonlinear), dt, order, substeps, contour);
}

Trajectory::Trajectory(const Grid& grid, int channels, int num_snapshots)
    : grid_(grid),
      channels_(channels),
      num_snapshots_(num_snapshots),
      data_(static_cast<std::size_t>(num_snapshots) * static_cast<std::size_t>(channels) * grid.spatial_size()) {
    if (channels < 1 || num_snapshots < 1) throw ShapeError("trajectory: channels and snapshots must be >= 1");
}

std::span<const double> Trajectory::snapshot_data(int t) const noexcept {
    return std::span<const double>(data_).subspan(static_cast<std::size_t>(t) * snapshot_size(), snapshot_size());
}

SpatialField Trajectory::snapshot(int t) const {
    if (t < 0 || t >= num_snapshots_) throw ShapeError("trajectory: snapshot index out of range");
    const auto s = snapshot_data(t);
    return SpatialField(grid_, channels_, std::vector<double>(s.begin(), s.end()));
}

void Trajectory::set_snapshot(int t, const SpatialField& field) {
    if (t < 0 || t >= num_snapshots_) throw ShapeError("trajectory: snapshot index out of range");
    if (field.grid() != grid_ || field.channels() != channels_) throw ShapeError("trajectory: snapshot shape mismatch");
    std::copy(field.data().begin(), field.data().end(),
              data_.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(t) * snapshot_size()));
}

Trajectory rollout(const Stepper& stepper, const SpatialField& ic, int num_steps, int warmup) {
    if (num_steps < 1) throw ConfigError("rollout: num_steps must be >= 1");
    if (warmup < 0) throw ConfigError("rollout: warmup must be >= 0");
    if (!ic.all_finite()) throw NumericError("non-finite field");
    SpatialField u = ic;
    for (int s = 0; s < warmup; ++s) {
        try {
            u = stepper.step(u);
        } catch (const DivergenceError&) {
            throw DivergenceError("trajectory diverged", s - warmup);
        }
    }
    Trajectory traj(ic.grid(), ic.channels(), num_steps + 1);
    traj.set_snapshot(0, u);
    for (int t = 1; t <= num_steps; ++t) {
        try {
            u = stepper.step(u);
        } catch (const DivergenceError&) {
            throw DivergenceError("trajectory diverged", t - 1);
        }
        traj.set_snapshot(t, u);
    }
    return traj;
}

}  // namespace emubench
