#pragma once

// Unrolled training objectives, correction layouts and a small Newton
// optimizer for low-dimensional emulators.

#include <cstddef>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emubench/etdrk.hpp"
#include "emubench/field.hpp"
#include "emubench/scenarios.hpp"

namespace emubench {

/// A parametrized one-step map. apply() must be pure.
class Emulator {
public:
    virtual ~Emulator() = default;
    [[nodiscard]] virtual std::size_t num_params() const noexcept = 0;
    [[nodiscard]] virtual SpatialField apply(std::span<const double> theta, const SpatialField& u) const = 0;
};

/// Kernel-size-two circular cross-correlation on 1D single-channel fields:
/// out[i] = theta[0] * u[i] + theta[1] * u[i + 1].
class LinearStencilEmulator final : public Emulator {
public:
    [[nodiscard]] std::size_t num_params() const noexcept override { return 2; }
    [[nodiscard]] SpatialField apply(std::span<const double> theta, const SpatialField& u) const override;
};

/// Wraps a reference stepper as a parameter-free emulator.
class SolverEmulator final : public Emulator {
public:
    explicit SolverEmulator(std::shared_ptr<const Stepper> stepper);
    [[nodiscard]] std::size_t num_params() const noexcept override { return 0; }
    [[nodiscard]] SpatialField apply(std::span<const double> theta, const SpatialField& u) const override;

private:
    std::shared_ptr<const Stepper> stepper_;
};

enum class CorrectionVariant { none, sequential, parallel };

[[nodiscard]] CorrectionVariant parse_correction_variant(std::string_view name);
[[nodiscard]] std::string_view correction_variant_name(CorrectionVariant variant);

struct CorrectionLayout {
    CorrectionVariant variant = CorrectionVariant::none;
    /// Required unless variant is none.
    std::shared_ptr<const Stepper> coarse;
};

/// Coarse stepper at `proportion` of the scenario's difficulty.
[[nodiscard]] CorrectionLayout make_correction_layout(const ScenarioSpec& spec, CorrectionVariant variant,
                                                      double proportion);

/// sequential: corrector(coarse(u)); parallel: coarse(u) + corrector(u);
/// none: the corrector itself.
[[nodiscard]] std::shared_ptr<const Emulator> compose_correction(const CorrectionLayout& layout,
                                                                 std::shared_ptr<const Emulator> corrector);

struct UnrollConfig {
    /// Main-chain length.
    int T = 1;
    /// Branch-chain length, 1 <= B <= T.
    int B = 1;
    /// w_t for t = 0..T-B; empty means all ones.
    std::vector<double> time_weights;
    /// w_b for b = 1..B; empty means all ones.
    std::vector<double> branch_weights;
    /// Main-chain states feed the next emulator call without sensitivity.
    bool cut_bptt = false;
    /// Branch inputs carry no sensitivity.
    bool cut_branch = false;

    void validate() const;
};

/// Training methodology label: "one", "sup;T" or "div;T".
struct Methodology {
    std::string label;
    UnrollConfig config;
};
[[nodiscard]] Methodology parse_methodology(std::string_view text);

/// Full-batch unrolled objective over every window of T+1 consecutive
/// snapshots in `data`. The loss of step t + b compares the emulator main
/// chain with the reference branch started from main-chain state t, using
/// the per-step MSE, weighted by w_t * w_b and averaged over windows.
///
/// Evaluation takes two parameter vectors: `live` is the one being
/// differentiated and `frozen` stands in wherever a gradient cut applies.
/// With live == frozen the value does not depend on the cut flags.
class UnrolledObjective {
public:
    /// `reference` may be null when T == B, since all branch targets then
    /// come from the stored data.
    UnrolledObjective(std::shared_ptr<const Emulator> emulator, std::shared_ptr<const Stepper> reference,
                      const TrajectorySet& data, UnrollConfig config, unsigned threads = 1);

    [[nodiscard]] double operator()(std::span<const double> live, std::span<const double> frozen) const;
    [[nodiscard]] double operator()(std::span<const double> theta) const { return (*this)(theta, theta); }

    [[nodiscard]] std::size_t num_windows() const noexcept { return windows_.size(); }
    [[nodiscard]] std::size_t num_params() const noexcept { return emulator_->num_params(); }
    [[nodiscard]] const UnrollConfig& config() const noexcept { return config_; }

private:
    struct Window {
        int sample;
        int start;
    };

    [[nodiscard]] double window_loss(const Window& w, std::span<const double> live, std::span<const double> frozen) const;

    std::shared_ptr<const Emulator> emulator_;
    std::shared_ptr<const Stepper> reference_;
    std::vector<std::vector<SpatialField>> snapshots_;
    std::vector<Window> windows_;
    UnrollConfig config_;
    unsigned threads_;
};

[[nodiscard]] double unrolled_objective(std::shared_ptr<const Emulator> emulator,
                                        std::shared_ptr<const Stepper> reference, const TrajectorySet& data,
                                        const UnrollConfig& config, std::span<const double> theta);

/// B = 1 special case with main-chain length T.
[[nodiscard]] double diverted_chain_objective(std::shared_ptr<const Emulator> emulator,
                                              std::shared_ptr<const Stepper> reference, const TrajectorySet& data,
                                              int T, std::span<const double> theta);

/// Mean squared difference over all entries.
[[nodiscard]] double mse(const SpatialField& a, const SpatialField& b);

/// First-order upwind stencil {1 - gamma1, gamma1}.
[[nodiscard]] std::vector<double> fou_stencil(double gamma1);

/// Objective of (live, frozen) parameters; see UnrolledObjective.
using SplitObjective = std::function<double(std::span<const double>, std::span<const double>)>;

struct NewtonOptions {
    /// Stops when the gradient norm or the accepted step norm drops below.
    double tol = 1e-10;
    int max_iters = 50;
    /// Relative central-difference step for the gradient.
    double gradient_step = 1e-6;
    /// Relative central-difference step for the Hessian (differences of
    /// gradients, so it is chosen larger to keep rounding noise down).
    double hessian_step = 1e-4;
};

struct NewtonResult {
    std::vector<double> theta;
    double objective = 0.0;
    double gradient_norm = 0.0;
    int iterations = 0;
};

/// Gradient of the live argument at live = frozen = theta.
[[nodiscard]] std::vector<double> finite_difference_gradient(const SplitObjective& objective,
                                                             std::span<const double> theta, double relative_step);

/// Damped Newton iterations with finite-difference derivatives. Levenberg
/// damping is added whenever the Hessian is not positive definite or the
/// step fails to decrease the objective. Throws OptimizationError carrying
/// the best parameters on non-convergence or a non-finite objective.
[[nodiscard]] NewtonResult train_newton(const SplitObjective& objective, std::vector<double> theta_init,
                                        const NewtonOptions& options = {});

}  // namespace emubench
