#include <benchmark/benchmark.h>

#include <vector>

#include "spoofguard/distance.hpp"
#include "spoofguard/rng.hpp"

namespace sg = spoofguard;

namespace {

std::vector<double> series(std::uint64_t seed, std::size_t n) {
    sg::Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = rng.uniform(-1.0, 1.0);
    return v;
}

void BM_DtwUnbounded(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = series(1, n), b = series(2, n);
    for (auto _ : state) benchmark::DoNotOptimize(sg::dtw(a, b, sg::BandSpec::unbounded()));
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_DtwUnbounded)->Arg(16)->Arg(64)->Arg(256)->Arg(1024);

void BM_DtwBand10Percent(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = series(1, n), b = series(2, n);
    for (auto _ : state) benchmark::DoNotOptimize(sg::dtw(a, b, sg::BandSpec::default_band()));
}
BENCHMARK(BM_DtwBand10Percent)->Arg(16)->Arg(64)->Arg(256)->Arg(1024);

void BM_Euclidean(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto a = series(1, n), b = series(2, n);
    for (auto _ : state) benchmark::DoNotOptimize(sg::euclidean(a, b));
}
BENCHMARK(BM_Euclidean)->Arg(256)->Arg(1024);

}  // namespace

BENCHMARK_MAIN();
