#include <benchmark/benchmark.h>

#include "srb/classifier.hpp"
#include "srb/market.hpp"
#include "srb/orbit_engine.hpp"
#include "srb/stats.hpp"
#include "support.hpp"

using namespace srb;

namespace {

void BM_OrbitPowerMaps(benchmark::State& state) {
    const auto ifs = testing::square_root_system(0.5);
    const auto steps = static_cast<int>(state.range(0));
    std::uint64_t stream = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_orbit(ifs, 0.37, steps, 42, stream++));
    }
    state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_OrbitPowerMaps)->Arg(1024)->Arg(16384);

void BM_OrbitPiecewiseMaps(benchmark::State& state) {
    const auto ifs = testing::two_attractor_system(0.5);
    const auto steps = static_cast<int>(state.range(0));
    std::uint64_t stream = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(sample_orbit(ifs, 0.41, steps, 42, stream++));
    }
    state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_OrbitPiecewiseMaps)->Arg(1024)->Arg(16384);

void BM_MarketStep(benchmark::State& state) {
    const auto model = testing::unit_payoff_market();
    const auto star = kelly_rule(model);
    const Strategy other({0.3, 0.7});
    const auto steps = static_cast<int>(state.range(0));
    std::uint64_t stream = 0;
    for (auto _ : state) {
        benchmark::DoNotOptimize(simulate_market(model, {star, other},
                                                 std::vector<double>{1.0, 1.0}, steps, 42,
                                                 stream++));
    }
    state.SetItemsProcessed(state.iterations() * steps);
}
BENCHMARK(BM_MarketStep)->Arg(1024)->Arg(16384);

void BM_PushForwardHistogram(benchmark::State& state) {
    const auto ifs = testing::two_attractor_system(0.5);
    auto measure = empirical_measure(sample_orbit(ifs, 0.41, 4096, 7)).binned();
    for (auto _ : state) {
        measure = push_forward(ifs, measure);
        benchmark::DoNotOptimize(measure);
    }
}
BENCHMARK(BM_PushForwardHistogram);

void BM_FixedPointScan(benchmark::State& state) {
    const auto map = testing::two_branch_first();
    for (auto _ : state) {
        benchmark::DoNotOptimize(find_fixed_points(map));
    }
}
BENCHMARK(BM_FixedPointScan);

void BM_Classify(benchmark::State& state) {
    const auto ifs = testing::two_attractor_system(0.5);
    for (auto _ : state) {
        benchmark::DoNotOptimize(classify(ifs, 2000));
    }
}
BENCHMARK(BM_Classify);

void BM_ExponentSeries(benchmark::State& state) {
    const auto ifs = testing::square_root_system(0.5);
    const auto orbit = sample_orbit(ifs, 0.37, 8192, 42);
    for (auto _ : state) {
        benchmark::DoNotOptimize(exponent_series(orbit, ifs));
    }
    state.SetItemsProcessed(state.iterations() * 8192);
}
BENCHMARK(BM_ExponentSeries);

}  // namespace

BENCHMARK_MAIN();
