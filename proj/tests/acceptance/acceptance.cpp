// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any
// failure. Oracles are computed here without the library's FFT where the
// check concerns the spectral machinery itself.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iterator>
#include <map>
#include <memory>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "emubench/error.hpp"
#include "emubench/experiment.hpp"
#include "emubench/metrics.hpp"
#include "emubench/rng.hpp"
#include "emubench/scenarios.hpp"
#include "emubench/training.hpp"
#include "emubench_app/commands.hpp"
#include "oracles.hpp"

using namespace emubench;
namespace fs = std::filesystem;

namespace {

constexpr double kPi = std::numbers::pi;

struct Outcome {
    bool pass;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
    return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string fmt(const char* format, auto... args) {
    char buf[512];
    std::snprintf(buf, sizeof buf, format, args...);
    return buf;
}

bool within_rel(double value, double target, double rel) { return std::abs(value - target) <= rel * std::abs(target); }

// Evaluates the trigonometric interpolant of `u` at fractional grid offsets
// x_i + shift (in cells), using a naive DFT.
std::vector<double> shifted_interpolant(std::span<const double> u, double shift) {
    const int n = static_cast<int>(u.size());
    const auto hat = oracle::dft(std::vector<double>(u.begin(), u.end()));
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        oracle::Complex sum = 0.0;
        for (int k = 0; k < n; ++k) {
            const int kk = k <= n / 2 ? k : k - n;
            // The Nyquist bin of a K-bandlimited signal is zero.
            if (2 * std::abs(kk) == n) continue;
            sum += hat[static_cast<std::size_t>(k)] * std::polar(1.0, 2.0 * kPi * kk * (i + shift) / n);
        }
        out[static_cast<std::size_t>(i)] = sum.real() / n;
    }
    return out;
}

Outcome analytic_advection() {
    const auto start = Clock::now();
    double worst = 0.0;
    for (double gamma1 : {0.75, -4.0, 10.5}) {
        auto spec = resolve_scenario("diff_adv", 1);
        spec.params["gamma1"] = gamma1;
        spec.ic.cutoff = 5;
        const auto stepper = build_stepper_from_spec(spec);
        const auto ic = sample_initial_condition(spec, 1);
        const auto traj = rollout(stepper, ic, 200);
        const auto exact = shifted_interpolant(ic.data(), 200.0 * gamma1);
        worst = std::max(worst, oracle::max_abs_diff(traj.snapshot_data(200), exact));
    }
    const double t = seconds_since(start);
    return {worst < 1e-10 && t < 5.0, fmt("max error %.2e, %.2fs", worst, t)};
}

Outcome diffusion_decay() {
    const auto spec = resolve_scenario("diff_diff", 1);
    // alpha_2 = gamma_2 / (N^2 2^1 D)
    const double alpha2 = spec.param("gamma2") / (160.0 * 160.0 * 2.0 * 1.0);
    const bool alpha_ok = spec.param("gamma2") == 4.0 && spec.num_points == 160 && alpha2 == 7.8125e-5 &&
                          resolve_scenario("norm_diff", 1).param("alpha2") == alpha2;
    const auto stepper = build_stepper_from_spec(spec);
    const auto u0 = sample_initial_condition(spec, 2);
    const auto u1 = stepper.step(u0);
    const auto h0 = oracle::dft(std::vector<double>(u0.data().begin(), u0.data().end()));
    const auto h1 = oracle::dft(std::vector<double>(u1.data().begin(), u1.data().end()));
    double worst = 0.0;
    for (int k = 1; k <= spec.ic.cutoff; ++k) {
        const double expected = std::exp(-alpha2 * std::pow(2.0 * kPi * k, 2));
        const auto ratio = h1[static_cast<std::size_t>(k)] / h0[static_cast<std::size_t>(k)];
        worst = std::max(worst, std::abs(ratio - expected));
    }
    return {alpha_ok && worst < 1e-12, fmt("alpha2 %.7e, max decay error %.2e", alpha2, worst)};
}

Outcome fou_baseline() {
    const auto start = Clock::now();
    StencilExperimentConfig config;
    config.test_steps = 10;
    const auto spec = stencil_experiment_spec(config);
    const auto test = generate_dataset(spec, Split::test, config.seed);
    const LinearStencilEmulator stencil;
    const auto rollouts = emulator_rollouts(stencil, fou_stencil(config.gamma1), test);
    std::vector<Trajectory> refs;
    for (int s = 0; s < test.samples; ++s) refs.push_back(test.trajectory(s));
    const auto report = rollout_metrics(rollouts, refs, metric_by_name("mean_nRMSE"), 10);
    const double s1 = report.losses[0];
    const double s10 = report.losses[9];
    const double t = seconds_since(start);
    return {test.samples == 50 && within_rel(s1, 0.055, 0.1) && within_rel(s10, 0.389, 0.1) && t < 10.0,
            fmt("step 1 %.4f (0.055), step 10 %.4f (0.389), %.2fs", s1, s10, t)};
}

struct Sweep {
    ExperimentReport report;
    double seconds;
};

const Sweep& stencil_sweep() {
    static const Sweep sweep = [] {
        const auto start = Clock::now();
        StencilExperimentConfig config;
        config.test_samples = 1;
        config.test_steps = 1;
        auto report = run_stencil_experiment(config);
        return Sweep{std::move(report), seconds_since(start)};
    }();
    return sweep;
}

const ExperimentCell* cell(const std::string& label) {
    for (const auto& c : stencil_sweep().report.cells) {
        if (c.methodology == label) return &c;
    }
    return nullptr;
}

Outcome learned_stencil() {
    const auto* one = cell("one");
    const auto* sup50 = cell("sup;50");
    if (!one || !sup50 || !one->ok || !sup50->ok) return {false, "training failed"};
    const bool ok = std::abs(one->theta[0] - 0.2668) <= 0.01 && std::abs(one->theta[1] - 0.7797) <= 0.01 &&
                    std::abs(sup50->theta[0] - 0.2568) <= 0.01 && std::abs(sup50->theta[1] - 0.7568) <= 0.01;
    const double t = stencil_sweep().seconds;
    return {ok && t < 120.0, fmt("T=1 (%.4f, %.4f), T=50 (%.4f, %.4f), sweep %.2fs", one->theta[0], one->theta[1],
                                 sup50->theta[0], sup50->theta[1], t)};
}

Outcome distance_sequence() {
    std::vector<double> d;
    for (const char* label : {"one", "sup;2", "sup;5", "sup;10", "sup;20", "sup;50"}) {
        const auto* c = cell(label);
        if (!c || !c->ok) return {false, std::string("training failed for ") + label};
        d.push_back(c->distance_to_fou);
    }
    bool ok = within_rel(d[0], 0.034, 0.3) && within_rel(d[3], 0.024, 0.3) && within_rel(d[5], 0.010, 0.3);
    for (std::size_t i = 1; i < d.size(); ++i) ok = ok && d[i] <= d[i - 1];
    return {ok, fmt("%.4f %.4f %.4f %.4f %.4f %.4f", d[0], d[1], d[2], d[3], d[4], d[5])};
}

Outcome convergence_orders() {
    const auto start = Clock::now();
    auto base = resolve_scenario("diff_burgers", 1);
    const auto ic = sample_initial_condition(base, 0);
    auto stepper_at = [&](int order, int substeps) {
        auto spec = base;
        spec.order = order;
        spec.substeps = substeps;
        return build_stepper_from_spec(spec);
    };
    // Same macro step, resolved by fourth-order ETDRK with 64 substeps.
    const auto reference = stepper_at(4, 64).step(ic);
    std::string detail;
    bool ok = true;
    for (int order = 1; order <= 4; ++order) {
        const double e1 = oracle::max_abs_diff(stepper_at(order, 2).step(ic).data(), reference.data());
        const double e2 = oracle::max_abs_diff(stepper_at(order, 4).step(ic).data(), reference.data());
        const double slope = std::log2(e1 / e2);
        ok = ok && std::abs(slope - order) <= 0.25;
        detail += fmt("%sETDRK%d %.2f", order == 1 ? "" : ", ", order, slope);
    }
    const double t = seconds_since(start);
    return {ok && t < 30.0, detail + fmt(", %.2fs", t)};
}

Outcome parseval() {
    oracle::Gen gen(7);
    const auto mse = metric_by_name("mean_MSE");
    const auto fmse = metric_by_name("mean_fourier_MSE");
    const auto rmse = metric_by_name("mean_RMSE");
    const auto frmse = metric_by_name("mean_fourier_RMSE");
    double worst = 0.0;
    for (int i = 0; i < 100; ++i) {
        const int dims = gen.integer(1, 3);
        const Grid grid(dims, dims == 3 ? 8 : 2 * gen.integer(4, 24), gen.uniform(0.5, 3.0));
        const int c = gen.integer(1, 2);
        const auto a = gen.noise(grid, c);
        const auto b = gen.noise(grid, c);
        for (const auto& [p, q] : {std::pair{&mse, &fmse}, std::pair{&rmse, &frmse}}) {
            const double x = compute_metric(*p, a, b);
            const double y = compute_metric(*q, a, b);
            worst = std::max(worst, std::abs(x - y) / std::abs(x));
        }
    }
    const auto a = gen.noise(Grid(1, 32), 1);
    const auto b = gen.noise(Grid(1, 32), 1);
    const double mae = compute_metric(metric_by_name("mean_MAE"), a, b);
    const double fmae = compute_metric(metric_by_name("mean_fourier_MAE"), a, b);
    return {worst < 1e-10 && std::abs(mae - fmae) > 1e-6 * mae,
            fmt("max relative gap %.2e, MAE %.4f vs fourier MAE %.4f", worst, mae, fmae)};
}

Outcome registry() {
    std::ostringstream out;
    app::run_list(out);
    const std::string text = out.str();
    const auto lines = std::count(text.begin(), text.end(), '\n');
    std::map<std::string, int> rows;
    for (const auto& d : registry_list()) ++rows[d.name];
    const std::map<std::string, int> table{
        {"adv", 3},       {"diff", 3},       {"adv_diff", 3},   {"disp", 3},       {"hyp", 3},
        {"unbal_adv", 2}, {"diag_diff", 2},  {"aniso_diff", 2}, {"mix_disp", 2},   {"mix_hyp", 2},
        {"burgers", 3},   {"burgers_sc", 2}, {"kdv", 3},        {"ks_cons", 1},    {"ks", 3},
        {"fisher", 3},    {"gs", 2},         {"sh", 2},         {"decay_turb", 1}, {"kolm_flow", 1},
    };
    return {lines == 46 && rows == table, fmt("%ld listed, %zu rows", static_cast<long>(lines), rows.size())};
}

Outcome difficulty_roundtrip() {
    oracle::Gen gen(9);
    double worst = 0.0;
    for (int i = 0; i < 1000; ++i) {
        DifficultyCoefficients d;
        d.num_points = gen.integer(8, 1024);
        d.num_dims = gen.integer(1, 3);
        d.max_abs = gen.uniform(0.01, 100.0);
        d.gammas.resize(5);
        for (auto& g : d.gammas) g = gen.uniform(-50.0, 50.0);
        d.deltas = {{std::string(kConv), gen.uniform(-5.0, 5.0)}, {std::string(kGradNorm), gen.uniform(-5.0, 5.0)},
                    {std::string(kQuad), gen.uniform(-5.0, 5.0)}};
        const auto back = normalized_to_difficulty(difficulty_to_normalized(d), d.num_points, d.num_dims, d.max_abs);
        for (std::size_t j = 0; j < 5; ++j) {
            worst = std::max(worst, std::abs(back.gammas[j] - d.gammas[j]) / std::max(1.0, std::abs(d.gammas[j])));
        }
        for (const auto& [k, v] : d.deltas) {
            worst = std::max(worst, std::abs(back.deltas.at(k) - v) / std::max(1.0, std::abs(v)));
        }
    }
    return {worst <= 1e-14, fmt("max relative error %.2e", worst)};
}

Outcome chaotic_boundedness() {
    const auto spec = resolve_scenario("diff_ks", 1);
    const auto stepper = build_stepper_from_spec(spec);
    double max_abs = 0.0;
    double max_corr = 0.0;
    int failures = 0;
    std::vector<int> decorrelation_steps;
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const auto ic = sample_initial_condition(spec, seed);
        // The restart perturbs the sampled initial condition and repeats the
        // warmup, which gives the perturbation the longest time to grow.
        auto perturbed = ic;
        RandomStream noise(1000 + seed);
        for (double& v : perturbed.data()) v += noise.uniform(-1e-6, 1e-6);
        try {
            const auto traj = rollout(stepper, ic, 200, spec.warmup);
            const auto other = rollout(stepper, perturbed, 200, spec.warmup);
            for (double v : traj.data()) max_abs = std::max(max_abs, std::abs(v));
            const double c = std::abs(correlation(traj.snapshot(200), other.snapshot(200)));
            max_corr = std::max(max_corr, c);
            if (c >= 0.5) {
                ++failures;
                // Diagnostic: how many steps decorrelation actually takes.
                auto a = traj.snapshot(200);
                auto b = other.snapshot(200);
                int t = 200;
                while (t < 5000 && std::abs(correlation(a, b)) >= 0.5) {
                    a = stepper.step(a);
                    b = stepper.step(b);
                    ++t;
                }
                decorrelation_steps.push_back(t);
            }
        } catch (const NumericError&) {
            ++failures;
        }
    }
    std::string detail = fmt("max|u| %.3f, max |corr| at step 200 %.3f, %d of 30 seeds still correlated", max_abs,
                             max_corr, failures);
    if (!decorrelation_steps.empty()) {
        std::sort(decorrelation_steps.begin(), decorrelation_steps.end());
        detail += fmt(" (median decorrelation at step %d)", decorrelation_steps[decorrelation_steps.size() / 2]);
    }
    return {failures == 0 && max_abs < 10.0, detail};
}

// Payloads run to gigabytes, so they are compared in chunks.
bool same_bytes(const fs::path& a, const fs::path& b, std::size_t& size) {
    std::ifstream fa(a, std::ios::binary);
    std::ifstream fb(b, std::ios::binary);
    if (!fa || !fb || fs::file_size(a) != fs::file_size(b)) return false;
    size = fs::file_size(a);
    std::vector<char> ba(1 << 20);
    std::vector<char> bb(1 << 20);
    while (fa && fb) {
        fa.read(ba.data(), static_cast<std::streamsize>(ba.size()));
        fb.read(bb.data(), static_cast<std::streamsize>(bb.size()));
        if (fa.gcount() != fb.gcount() || !std::equal(ba.begin(), ba.begin() + fa.gcount(), bb.begin())) return false;
    }
    return size > 0;
}

Outcome determinism() {
    const auto start = Clock::now();
    const fs::path root = fs::temp_directory_path() / "emubench_acceptance_determinism";
    fs::remove_all(root);
    std::ostringstream sink;
    bool ok = true;
    const unsigned threads[] = {1, 3};
    for (int run = 0; run < 2; ++run) {
        app::RunConfig config;
        config.scenario = "2d_diff_burgers";
        config.dims = 2;
        config.seed = 7;
        config.threads = threads[run];
        config.out = root / std::to_string(run);
        ok = ok && app::run_generate(config, sink, sink) == app::kExitOk;
    }
    std::size_t bytes = 0;
    for (const char* file : {"2d_diff_burgers.train.raw64", "2d_diff_burgers.test.raw64"}) {
        std::size_t size = 0;
        ok = ok && same_bytes(root / "0" / file, root / "1" / file, size);
        bytes += size;
    }
    fs::remove_all(root);
    return {ok, fmt("%zu payload bytes compared, %.1fs", bytes, seconds_since(start))};
}

Outcome correction_reductions() {
    StencilExperimentConfig config;
    config.train_steps = 60;
    const auto spec = stencil_experiment_spec(config);
    const auto data = generate_dataset(spec, Split::train, 0);
    const auto stencil = std::make_shared<LinearStencilEmulator>();
    const auto full = compose_correction(make_correction_layout(spec, CorrectionVariant::sequential, 1.0), stencil);
    const auto none = compose_correction(make_correction_layout(spec, CorrectionVariant::sequential, 0.0), stencil);
    const std::vector<double> identity{1.0, 0.0};
    double exact = 0.0;
    double gap = 0.0;
    oracle::Gen gen(12);
    for (const char* label : {"one", "sup;5", "sup;50"}) {
        const auto m = parse_methodology(label);
        exact = std::max(exact, unrolled_objective(full, nullptr, data, m.config, identity));
        for (int i = 0; i < 3; ++i) {
            const std::vector<double> th{gen.uniform(0.0, 0.5), gen.uniform(0.5, 1.0)};
            const double plain = unrolled_objective(stencil, nullptr, data, m.config, th);
            const double reduced = unrolled_objective(none, nullptr, data, m.config, th);
            gap = std::max(gap, std::abs(plain - reduced) / std::max(1.0, std::abs(plain)));
        }
    }
    return {exact < 1e-20 && gap <= 1e-14, fmt("identity-corrected objective %.2e, zero-coarse gap %.2e", exact, gap)};
}

}  // namespace

// Optional arguments select criteria by number.
int main(int argc, char** argv) {
    std::vector<int> selected;
    for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
    const std::pair<const char*, std::function<Outcome()>> criteria[] = {
        {"analytic linear integration", analytic_advection},
        {"diffusion decay law", diffusion_decay},
        {"FOU baseline table", fou_baseline},
        {"learned stencil values", learned_stencil},
        {"distance-to-FOU sequence", distance_sequence},
        {"ETDRK convergence orders", convergence_orders},
        {"Parseval metric equality", parseval},
        {"registry integrity", registry},
        {"difficulty roundtrip", difficulty_roundtrip},
        {"chaotic-scenario boundedness", chaotic_boundedness},
        {"determinism", determinism},
        {"correction reductions", correction_reductions},
    };
    int failed = 0;
    int index = 0;
    for (const auto& [name, check] : criteria) {
        ++index;
        if (!selected.empty() && std::find(selected.begin(), selected.end(), index) == selected.end()) continue;
        Outcome outcome;
        try {
            outcome = check();
        } catch (const std::exception& e) {
            outcome = {false, std::string("exception: ") + e.what()};
        }
        if (!outcome.pass) ++failed;
        std::printf("%s %2d %s: %s\n", outcome.pass ? "PASS" : "FAIL", index, name, outcome.detail.c_str());
        std::fflush(stdout);
    }
    return failed == 0 ? 0 : 1;
}
