#include <benchmark/benchmark.h>

#include <random>

#include "surroflow/algorithm1.hpp"
#include "surroflow/ricci_flow.hpp"

using namespace surroflow;

namespace {

const Domain kSquare({{-5.0, 5.0}, {-5.0, 5.0}});

FourierSurrogate ackley_fit(std::size_t order) {
    const auto& spec = benchmark_by_name("ackley");
    const auto samples = grid_samples(kSquare, 4 * order + 4, spec.as_field());
    return fit_coefficients_ls(samples, order, kSquare, FitOptions{1e-3, 4.0, 2.0});
}

void BM_SurrogatePoint(benchmark::State& state) {
    const auto s = ackley_fit(static_cast<std::size_t>(state.range(0)));
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> u(-5.0, 5.0);
    Point p{u(rng), u(rng)};
    for (auto _ : state) {
        benchmark::DoNotOptimize(s(p));
        p[0] = u(rng);
    }
}
BENCHMARK(BM_SurrogatePoint)->Arg(3)->Arg(5)->Arg(10);

void BM_SurrogateGrid(benchmark::State& state) {
    const auto s = ackley_fit(static_cast<std::size_t>(state.range(0)));
    const GridAxis axis{-5.0, 5.0, 200};
    for (auto _ : state) benchmark::DoNotOptimize(s.evaluate_grid(axis, axis));
    state.SetItemsProcessed(state.iterations() * 200 * 200);
}
BENCHMARK(BM_SurrogateGrid)->Arg(3)->Arg(10)->Unit(benchmark::kMillisecond);

void BM_LeastSquaresFit(benchmark::State& state) {
    const auto order = static_cast<std::size_t>(state.range(0));
    const auto& spec = benchmark_by_name("rastrigin");
    const auto samples = grid_samples(kSquare, static_cast<std::size_t>(state.range(1)), spec.as_field());
    for (auto _ : state) benchmark::DoNotOptimize(fit_coefficients_ls(samples, order, kSquare, FitOptions{1e-3, 4.0, 2.0}));
}
BENCHMARK(BM_LeastSquaresFit)->Args({3, 20})->Args({10, 60})->Unit(benchmark::kMillisecond);

void BM_GeodesicDistanceField(benchmark::State& state) {
    const auto s = ackley_fit(3);
    const Point p{0.3, -0.7};
    GeodesicOptions opt;
    opt.resolution = static_cast<std::size_t>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(geodesic_distance_field(s, p, opt));
}
BENCHMARK(BM_GeodesicDistanceField)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_GaussianCurvature(benchmark::State& state) {
    FlowConfig cfg;
    const auto m = init_metric(ackley_fit(3), cfg, Sense::kMin);
    for (auto _ : state) benchmark::DoNotOptimize(gaussian_curvature(m));
}
BENCHMARK(BM_GaussianCurvature)->Unit(benchmark::kMicrosecond);

void BM_FlowStep(benchmark::State& state) {
    FlowConfig cfg;
    auto m = init_metric(ackley_fit(3), cfg, Sense::kMin);
    for (auto _ : state) benchmark::DoNotOptimize(flow_step(m, cfg, FlowDirection::kForward));
}
BENCHMARK(BM_FlowStep)->Unit(benchmark::kMicrosecond);

void BM_BuildSurrogate(benchmark::State& state) {
    const auto& spec = benchmark_by_name("booth");
    Algorithm1Config cfg;
    for (auto _ : state) benchmark::DoNotOptimize(build_surrogate(spec, NoiseModel{}, cfg));
}
BENCHMARK(BM_BuildSurrogate)->Unit(benchmark::kMillisecond)->Iterations(3);

}  // namespace
BENCHMARK_MAIN();
