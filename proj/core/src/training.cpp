#include "emubench/training.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <string>
#include <utility>

#include "emubench/error.hpp"
#include "emubench/parallel.hpp"

namespace emubench {

SpatialField LinearStencilEmulator::apply(std::span<const double> theta, const SpatialField& u) const {
    if (theta.size() != 2) throw ShapeError("stencil emulator: expected 2 parameters");
    if (u.grid().num_dims != 1 || u.channels() != 1) throw ShapeError("stencil emulator: needs a 1D single-channel field");
    SpatialField out(u.grid(), 1);
    const auto in = u.data();
    auto o = out.data();
    const std::size_t n = in.size();
    for (std::size_t i = 0; i < n; ++i) o[i] = theta[0] * in[i] + theta[1] * in[(i + 1) % n];
    return out;
}

SolverEmulator::SolverEmulator(std::shared_ptr<const Stepper> stepper) : stepper_(std::move(stepper)) {
    if (!stepper_) throw ConfigError("solver emulator: missing stepper");
}

SpatialField SolverEmulator::apply(std::span<const double>, const SpatialField& u) const { return stepper_->step(u); }

CorrectionVariant parse_correction_variant(std::string_view name) {
    if (name == "none") return CorrectionVariant::none;
    if (name == "sequential") return CorrectionVariant::sequential;
    if (name == "parallel") return CorrectionVariant::parallel;
    throw ConfigError("unknown correction layout: " + std::string(name));
}

std::string_view correction_variant_name(CorrectionVariant variant) {
    switch (variant) {
        case CorrectionVariant::none: return "none";
        case CorrectionVariant::sequential: return "sequential";
        case CorrectionVariant::parallel: return "parallel";
    }
    return "none";
}

CorrectionLayout make_correction_layout(const ScenarioSpec& spec, CorrectionVariant variant, double proportion) {
    CorrectionLayout layout;
    layout.variant = variant;
    if (variant != CorrectionVariant::none) {
        layout.coarse = std::make_shared<const Stepper>(build_coarse_stepper(spec, proportion));
    }
    return layout;
}

namespace {

class CorrectedEmulator final : public Emulator {
public:
    CorrectedEmulator(CorrectionLayout layout, std::shared_ptr<const Emulator> corrector)
        : layout_(std::move(layout)), corrector_(std::move(corrector)) {}

    [[nodiscard]] std::size_t num_params() const noexcept override { return corrector_->num_params(); }

    [[nodiscard]] SpatialField apply(std::span<const double> theta, const SpatialField& u) const override {
        const SpatialField coarse = layout_.coarse->step(u);
        if (layout_.variant == CorrectionVariant::sequential) return corrector_->apply(theta, coarse);
        SpatialField correction = corrector_->apply(theta, u);
        if (correction.grid() != coarse.grid() || correction.channels() != coarse.channels()) {
            throw ShapeError("parallel correction: corrector output does not match the coarse solver");
        }
        correction += coarse;
        return correction;
    }

private:
    CorrectionLayout layout_;
    std::shared_ptr<const Emulator> corrector_;
};

}  // namespace

std::shared_ptr<const Emulator> compose_correction(const CorrectionLayout& layout,
                                                   std::shared_ptr<const Emulator> corrector) {
    if (!corrector) throw ConfigError("correction: missing corrector");
    if (layout.variant == CorrectionVariant::none) return corrector;
    if (!layout.coarse) throw ConfigError("correction: layout needs a coarse stepper");
    return std::make_shared<const CorrectedEmulator>(layout, std::move(corrector));
}

void UnrollConfig::validate() const {
    if (T < 1) throw ConfigError("unroll: T must be >= 1");
    if (B < 1 || B > T) throw ConfigError("unroll: B must be in 1..T");
    if (!time_weights.empty() && time_weights.size() != static_cast<std::size_t>(T - B + 1)) {
        throw ConfigError("unroll: expected T - B + 1 time weights");
    }
    if (!branch_weights.empty() && branch_weights.size() != static_cast<std::size_t>(B)) {
        throw ConfigError("unroll: expected B branch weights");
    }
    const auto check = [](const std::vector<double>& w) {
        if (std::any_of(w.begin(), w.end(), [](double v) { return !(v >= 0.0) || !std::isfinite(v); })) {
            throw ConfigError("unroll: weights must be nonnegative");
        }
        if (!w.empty() && std::all_of(w.begin(), w.end(), [](double v) { return v == 0.0; })) {
            throw ConfigError("unroll: weights must not all be zero");
        }
    };
    check(time_weights);
    check(branch_weights);
}

Methodology parse_methodology(std::string_view text) {
    Methodology m;
    m.label = std::string(text);
    if (text == "one") return m;
    const auto sep = text.find(';');
    if (sep == std::string_view::npos) throw ConfigError("unknown methodology: " + m.label);
    const std::string_view kind = text.substr(0, sep);
    const std::string_view count = text.substr(sep + 1);
    int t = 0;
    const auto [ptr, ec] = std::from_chars(count.data(), count.data() + count.size(), t);
    if (ec != std::errc() || ptr != count.data() + count.size() || t < 1) {
        throw ConfigError("methodology needs a positive unroll length: " + m.label);
    }
    m.config.T = t;
    if (kind == "sup") {
        m.config.B = t;
    } else if (kind == "div") {
        m.config.B = 1;
    } else {
        throw ConfigError("unknown methodology: " + m.label);
    }
    return m;
}

double mse(const SpatialField& a, const SpatialField& b) {
    require_same_shape(a, b);
    const auto x = a.data();
    const auto y = b.data();
    double sum = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double d = x[i] - y[i];
        sum += d * d;
    }
    return sum / static_cast<double>(x.size());
}

UnrolledObjective::UnrolledObjective(std::shared_ptr<const Emulator> emulator, std::shared_ptr<const Stepper> reference,
                                     const TrajectorySet& data, UnrollConfig config, unsigned threads)
    : emulator_(std::move(emulator)), reference_(std::move(reference)), config_(std::move(config)), threads_(threads) {
    if (!emulator_) throw ConfigError("objective: missing emulator");
    config_.validate();
    if (config_.T + 1 > data.snapshots) {
        throw ConfigError("objective: T + 1 = " + std::to_string(config_.T + 1) + " exceeds trajectory length " +
                          std::to_string(data.snapshots));
    }
    if (config_.T > config_.B && !reference_) {
        throw ConfigError("objective: branches beyond t = 0 need a reference stepper");
    }
    if (config_.time_weights.empty()) config_.time_weights.assign(static_cast<std::size_t>(config_.T - config_.B + 1), 1.0);
    if (config_.branch_weights.empty()) config_.branch_weights.assign(static_cast<std::size_t>(config_.B), 1.0);
    snapshots_.resize(static_cast<std::size_t>(data.samples));
    for (int s = 0; s < data.samples; ++s) {
        auto& snaps = snapshots_[static_cast<std::size_t>(s)];
        snaps.reserve(static_cast<std::size_t>(data.snapshots));
        for (int t = 0; t < data.snapshots; ++t) snaps.push_back(data.state(s, t));
        for (int start = 0; start + config_.T < data.snapshots; ++start) windows_.push_back({s, start});
    }
    if (windows_.empty()) throw ConfigError("objective: dataset has no windows");
}

double UnrolledObjective::window_loss(const Window& w, std::span<const double> live,
                                      std::span<const double> frozen) const {
    const auto& snaps = snapshots_[static_cast<std::size_t>(w.sample)];
    const int T = config_.T;
    const int B = config_.B;
    const bool need_frozen = config_.cut_bptt || config_.cut_branch;

    // chain[k] is the state whose comparison carries live sensitivity;
    // frozen_chain[k] stands behind every cut.
    std::vector<SpatialField> chain;
    std::vector<SpatialField> frozen_chain;
    chain.reserve(static_cast<std::size_t>(T + 1));
    chain.push_back(snaps[static_cast<std::size_t>(w.start)]);
    if (need_frozen) {
        frozen_chain.reserve(static_cast<std::size_t>(T + 1));
        frozen_chain.push_back(chain.front());
    }
    for (int k = 1; k <= T; ++k) {
        if (need_frozen) frozen_chain.push_back(emulator_->apply(frozen, frozen_chain.back()));
        const SpatialField& input = config_.cut_bptt ? frozen_chain[static_cast<std::size_t>(k - 1)] : chain.back();
        chain.push_back(emulator_->apply(live, input));
    }

    double total = 0.0;
    for (int t = 0; t <= T - B; ++t) {
        const double wt = config_.time_weights[static_cast<std::size_t>(t)];
        if (wt == 0.0) continue;
        SpatialField branch =
            t == 0 ? chain.front() : (config_.cut_branch ? frozen_chain : chain)[static_cast<std::size_t>(t)];
        for (int b = 1; b <= B; ++b) {
            const double wb = config_.branch_weights[static_cast<std::size_t>(b - 1)];
            // Branches from the window start are the stored reference data.
            if (t == 0) {
                branch = snaps[static_cast<std::size_t>(w.start + b)];
            } else {
                branch = reference_->step(branch);
            }
            if (wb == 0.0) continue;
            total += wt * wb * mse(chain[static_cast<std::size_t>(t + b)], branch);
        }
    }
    return total;
}

double UnrolledObjective::operator()(std::span<const double> live, std::span<const double> frozen) const {
    if (live.size() != emulator_->num_params() || frozen.size() != emulator_->num_params()) {
        throw ShapeError("objective: parameter count mismatch");
    }
    std::vector<double> losses(windows_.size());
    parallel_for(windows_.size(), threads_, [&](std::size_t i) { losses[i] = window_loss(windows_[i], live, frozen); });
    double sum = 0.0;
    for (const double l : losses) sum += l;
    return sum / static_cast<double>(losses.size());
}

double unrolled_objective(std::shared_ptr<const Emulator> emulator, std::shared_ptr<const Stepper> reference,
                          const TrajectorySet& data, const UnrollConfig& config, std::span<const double> theta) {
    return UnrolledObjective(std::move(emulator), std::move(reference), data, config)(theta);
}

double diverted_chain_objective(std::shared_ptr<const Emulator> emulator, std::shared_ptr<const Stepper> reference,
                                const TrajectorySet& data, int T, std::span<const double> theta) {
    UnrollConfig config;
    config.T = T;
    config.B = 1;
    return unrolled_objective(std::move(emulator), std::move(reference), data, config, theta);
}

std::vector<double> fou_stencil(double gamma1) { return {1.0 - gamma1, gamma1}; }

namespace {

double step_size(double relative, double value) { return relative * std::max(1.0, std::abs(value)); }

double norm2(std::span<const double> v) {
    double s = 0.0;
    for (const double x : v) s += x * x;
    return std::sqrt(s);
}

// Hessian as the symmetrized Jacobian of the finite-difference gradient.
std::vector<double> finite_difference_hessian(const SplitObjective& objective, std::span<const double> theta,
                                              const NewtonOptions& options) {
    const std::size_t n = theta.size();
    std::vector<double> h(n * n);
    std::vector<double> p(theta.begin(), theta.end());
    for (std::size_t j = 0; j < n; ++j) {
        const double step = step_size(options.hessian_step, theta[j]);
        p[j] = theta[j] + step;
        const auto gp = finite_difference_gradient(objective, p, options.gradient_step);
        p[j] = theta[j] - step;
        const auto gm = finite_difference_gradient(objective, p, options.gradient_step);
        p[j] = theta[j];
        for (std::size_t i = 0; i < n; ++i) h[i * n + j] = (gp[i] - gm[i]) / (2.0 * step);
    }
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = i + 1; j < n; ++j) {
            const double avg = 0.5 * (h[i * n + j] + h[j * n + i]);
            h[i * n + j] = avg;
            h[j * n + i] = avg;
        }
    }
    return h;
}

// Solves (H + lambda I) x = -g by Cholesky; false if not positive definite.
bool damped_newton_step(const std::vector<double>& hessian, std::span<const double> gradient, double lambda,
                        std::vector<double>& step) {
    const std::size_t n = gradient.size();
    std::vector<double> l(n * n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j <= i; ++j) {
            double s = hessian[i * n + j] + (i == j ? lambda : 0.0);
            for (std::size_t k = 0; k < j; ++k) s -= l[i * n + k] * l[j * n + k];
            if (i == j) {
                if (!(s > 0.0)) return false;
                l[i * n + i] = std::sqrt(s);
            } else {
                l[i * n + j] = s / l[j * n + j];
            }
        }
    }
    step.assign(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        double s = -gradient[i];
        for (std::size_t k = 0; k < i; ++k) s -= l[i * n + k] * step[k];
        step[i] = s / l[i * n + i];
    }
    for (std::size_t i = n; i-- > 0;) {
        double s = step[i];
        for (std::size_t k = i + 1; k < n; ++k) s -= l[k * n + i] * step[k];
        step[i] = s / l[i * n + i];
    }
    return true;
}

}  // namespace

std::vector<double> finite_difference_gradient(const SplitObjective& objective, std::span<const double> theta,
                                               double relative_step) {
    const std::vector<double> frozen(theta.begin(), theta.end());
    std::vector<double> live = frozen;
    std::vector<double> g(theta.size());
    for (std::size_t i = 0; i < theta.size(); ++i) {
        const double step = step_size(relative_step, theta[i]);
        live[i] = theta[i] + step;
        const double up = objective(live, frozen);
        live[i] = theta[i] - step;
        const double down = objective(live, frozen);
        live[i] = theta[i];
        g[i] = (up - down) / (2.0 * step);
    }
    return g;
}

NewtonResult train_newton(const SplitObjective& objective, std::vector<double> theta_init, const NewtonOptions& options) {
    if (theta_init.empty()) throw ConfigError("newton: empty parameter vector");
    if (options.max_iters < 1 || !(options.tol > 0.0)) throw ConfigError("newton: invalid options");
    NewtonResult result;
    result.theta = std::move(theta_init);
    result.objective = objective(result.theta, result.theta);
    if (!std::isfinite(result.objective)) throw OptimizationError("newton: non-finite objective", result.theta);

    for (int it = 1; it <= options.max_iters; ++it) {
        const auto g = finite_difference_gradient(objective, result.theta, options.gradient_step);
        result.gradient_norm = norm2(g);
        if (!std::isfinite(result.gradient_norm)) throw OptimizationError("newton: non-finite gradient", result.theta);
        if (result.gradient_norm < options.tol) return result;
        const auto h = finite_difference_hessian(objective, result.theta, options);
        result.iterations = it;

        double scale = 0.0;
        for (std::size_t i = 0; i < g.size(); ++i) scale = std::max(scale, std::abs(h[i * g.size() + i]));
        double lambda = 0.0;
        std::vector<double> step;
        bool accepted = false;
        for (int attempt = 0; attempt < 60 && !accepted; ++attempt) {
            if (attempt > 0) lambda = lambda == 0.0 ? 1e-8 * std::max(scale, 1e-300) : 10.0 * lambda;
            if (!damped_newton_step(h, g, lambda, step)) continue;
            std::vector<double> candidate = result.theta;
            for (std::size_t i = 0; i < step.size(); ++i) candidate[i] += step[i];
            const double value = objective(candidate, candidate);
            // Rounding near the optimum can lift the value by a few ulps.
            const double slack = 1e-12 * std::abs(result.objective);
            if (std::isfinite(value) && value <= result.objective + slack) {
                accepted = true;
                result.theta = std::move(candidate);
                result.objective = value;
            } else if (norm2(step) < options.tol) {
                return result;
            }
        }
        if (!accepted) throw OptimizationError("newton: no descent step found", result.theta);
        if (norm2(step) < options.tol) return result;
    }
    throw OptimizationError("newton: maximum iterations exceeded", result.theta);
}

}  // namespace emubench
