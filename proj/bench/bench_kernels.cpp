// Parallel kernels against their serial references.

#include "support.hpp"

#include <benchmark/benchmark.h>

using namespace syrenn;
using namespace syrenn::testing;

namespace {

Network deep_relu(std::size_t width, std::size_t depth) {
    Rng rng(64);
    NetSpec spec;
    spec.output_dim = 5;
    spec.widths.assign(depth, width);
    spec.activations.assign(depth, Activation::Relu);
    spec.weight_scale = std::sqrt(2.0);
    return random_network(rng, spec);
}

// Runs every layer of the network through one Extend kernel.
template <class Kernel>
std::size_t fold(const Network& net, const PlanarRegion& x, Kernel kernel, const EngineOptions& opts) {
    PartitionSet2D parts{x, {x}};
    for (const Layer& layer : net.layers()) parts = kernel(LayerTransformer(layer), parts, opts);
    return parts.regions.size();
}

void BM_Extend2dParallel(benchmark::State& state) {
    const Network net = deep_relu(static_cast<std::size_t>(state.range(0)), 4);
    const PlanarRegion x = square(1.0);
    EngineOptions opts;
    std::size_t regions = 0;
    for (auto _ : state) benchmark::DoNotOptimize(regions = fold(net, x, extend_2d, opts));
    state.counters["regions"] = static_cast<double>(regions);
}

void BM_Extend2dReference(benchmark::State& state) {
    const Network net = deep_relu(static_cast<std::size_t>(state.range(0)), 4);
    const PlanarRegion x = square(1.0);
    EngineOptions opts;
    std::size_t regions = 0;
    for (auto _ : state) benchmark::DoNotOptimize(regions = fold(net, x, extend_2d_reference, opts));
    state.counters["regions"] = static_cast<double>(regions);
}

void BM_SampledIgParallel(benchmark::State& state) {
    const Network net = deep_relu(32, 3);
    const Point x0 = Point::Constant(2, -1.0);
    const Point x1 = Point::Constant(2, 1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(sampled_ig(net, x0, x1, 0, static_cast<std::size_t>(state.range(0)),
                                            RiemannScheme::Trapezoid));
}

void BM_SampledIgReference(benchmark::State& state) {
    const Network net = deep_relu(32, 3);
    const Point x0 = Point::Constant(2, -1.0);
    const Point x1 = Point::Constant(2, 1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(sampled_ig_reference(net, x0, x1, 0, static_cast<std::size_t>(state.range(0)),
                                                      RiemannScheme::Trapezoid));
}

} // namespace

BENCHMARK(BM_Extend2dParallel)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_Extend2dReference)->Arg(16)->Arg(32)->Arg(64)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampledIgParallel)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_SampledIgReference)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
