#pragma once

// Linear diagonals and the pseudo-spectral nonlinearity catalog.

#include <array>
#include <variant>
#include <vector>

#include "emubench/etdrk.hpp"
#include "emubench/field.hpp"
#include "emubench/spectral.hpp"

namespace emubench {

/// a_j multiplies the j-th derivative summed over all axes; a_0 acts once.
struct IsotropicLinearCoefficients {
    std::vector<double> a;
};

/// sum_j a_j sum_d (i kappa_d)^j
[[nodiscard]] DiagonalLinearOperator build_isotropic_linear(const IsotropicLinearCoefficients& coeffs,
                                                            const Grid& grid);

namespace mix {

/// -sum_d c_d d/dx_d
struct UnbalancedAdvection {
    std::vector<double> velocity;
};
/// sum_d nu_d d^2/dx_d^2
struct DiagonalDiffusion {
    std::vector<double> nu;
};
/// div(A grad u), A symmetric positive semi-definite, row-major D x D
struct AnisotropicDiffusion {
    std::vector<double> matrix;
};
/// xi * sum_d d/dx_d (Laplacian)
struct MixedDispersion {
    double xi = 0.0;
};
/// -zeta * Laplacian^2
struct MixedHyperdiffusion {
    double zeta = 0.0;
};

}  // namespace mix

using SpatialMixSpec = std::variant<mix::UnbalancedAdvection, mix::DiagonalDiffusion, mix::AnisotropicDiffusion,
                                    mix::MixedDispersion, mix::MixedHyperdiffusion>;

[[nodiscard]] DiagonalLinearOperator build_spatially_mixed_linear(const SpatialMixSpec& spec, const Grid& grid);

// Every nonlinearity below is written with a leading minus on its scale b,
// so b < 0 from the difficulty tables produces +|b| in the PDE.
namespace nl {

/// -b/2 div(u (x) u) for a D-channel velocity field. With
/// conservative = false: -b (u . grad) u.
struct Convection {
    double b = 1.0;
    bool conservative = true;
};
/// -b/2 sum_d d/dx_d (u^2), one channel.
struct SingleChannelConvection {
    double b = 1.0;
};
/// -b/2 |grad u|^2, one channel. `zero_mean` removes the mean of the
/// output, which keeps Kuramoto-Sivashinsky trajectories from drifting.
struct GradientNorm {
    double b = 1.0;
    bool zero_mean = true;
};
/// sum_j c_j u^j, applied channelwise.
struct Polynomial {
    std::vector<double> coefficients;
};
/// -b (v . grad) w with v = (d psi/dy, -d psi/dx) and Laplacian psi = -w,
/// plus the constant forcing -scale * k_f cos(k_f 2 pi y / L) when
/// forcing_wavenumber > 0. D = 2, one channel. Linear drag belongs in the
/// linear operator.
struct VorticityConvection {
    double b = 1.0;
    int forcing_wavenumber = 0;
    double forcing_scale = 1.0;
};
/// b0 u^2 - b1/2 sum_d d/dx_d (u^2) - b2/2 |grad u|^2, one channel. The
/// gradient-norm part uses the zero-mean fix like GradientNorm.
struct General {
    double b0 = 0.0;
    double b1 = 0.0;
    double b2 = 0.0;
};
/// Gray-Scott reaction on (u0, u1): (-u0 u1^2 + f, u0 u1^2). The linear
/// parts -f and -(f + k) belong in the linear operator.
struct GrayScott {
    double feed = 0.04;
    double kill = 0.06;
};

}  // namespace nl

using NonlinearSpec = std::variant<nl::Convection, nl::SingleChannelConvection, nl::GradientNorm, nl::Polynomial,
                                   nl::VorticityConvection, nl::General, nl::GrayScott>;

/// Channel count the nonlinearity expects on a grid of the given dimension.
/// Returns 0 if any count works (polynomial).
[[nodiscard]] int nonlinear_channels(const NonlinearSpec& spec, int num_dims);

[[nodiscard]] NonlinearFunction build_nonlinear(const NonlinearSpec& spec, const Grid& grid,
                                                const DealiasMask& dealias);

/// Divides every mode by -(kappa_x^2 + kappa_y^2); the mean mode becomes 0.
[[nodiscard]] SpectralField inverse_laplacian(const SpectralField& field, const Grid& grid);

/// -(sum_d kappa_d^2) per half-spectrum bin.
[[nodiscard]] std::vector<double> laplacian_values(const Grid& grid);

}  // namespace emubench
