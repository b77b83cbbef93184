#include <benchmark/benchmark.h>

#include <memory>

#include "emubench/experiment.hpp"
#include "emubench/scenarios.hpp"
#include "emubench/spectral.hpp"
#include "emubench/training.hpp"

namespace {

using namespace emubench;

void BM_ForwardTransform(benchmark::State& state) {
    const Grid grid(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    SpatialField u(grid, 1);
    for (std::size_t i = 0; i < u.data().size(); ++i) u.data()[i] = static_cast<double>(i % 7) - 3.0;
    SpectralField hat(grid, 1);
    for (auto _ : state) {
        detail::forward_transform_into(u, hat);
        benchmark::DoNotOptimize(hat.data().data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid.spatial_size()));
}
BENCHMARK(BM_ForwardTransform)->Args({1, 160})->Args({2, 160})->Args({3, 32});

void BM_Step(benchmark::State& state, const char* id, int dims) {
    const auto spec = resolve_scenario(id, dims);
    const auto stepper = build_stepper_from_spec(spec);
    SpatialField u = sample_initial_condition(spec, 0);
    for (auto _ : state) {
        u = stepper.step(u);
        benchmark::DoNotOptimize(u.data().data());
    }
    state.SetItemsProcessed(state.iterations());
}
BENCHMARK_CAPTURE(BM_Step, adv_1d, "diff_adv", 1);
BENCHMARK_CAPTURE(BM_Step, burgers_1d, "diff_burgers", 1);
BENCHMARK_CAPTURE(BM_Step, ks_1d, "diff_ks", 1);
BENCHMARK_CAPTURE(BM_Step, burgers_2d, "diff_burgers", 2);
BENCHMARK_CAPTURE(BM_Step, gs_2d, "gs", 2);
BENCHMARK_CAPTURE(BM_Step, burgers_3d, "diff_burgers", 3);

void BM_StencilObjective(benchmark::State& state) {
    StencilExperimentConfig config;
    const auto spec = stencil_experiment_spec(config);
    const auto data = generate_dataset(spec, Split::train, 0, 1);
    const auto reference = std::make_shared<const Stepper>(build_stepper_from_spec(spec));
    const auto methodology = parse_methodology("div;" + std::to_string(state.range(0)));
    const UnrolledObjective objective(std::make_shared<LinearStencilEmulator>(), reference, data, methodology.config);
    const std::vector<double> theta = fou_stencil(config.gamma1);
    for (auto _ : state) benchmark::DoNotOptimize(objective(theta));
}
BENCHMARK(BM_StencilObjective)->Arg(1)->Arg(10)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
