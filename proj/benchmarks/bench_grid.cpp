#include <benchmark/benchmark.h>

#include "srf/grid.hpp"
#include "srf/rng.hpp"

namespace {

srf::ScalarField make_field4d() {
    srf::Grid g({-2, -2, -0.52, -3.14}, {2, 2, 0.52, 3.14}, {41, 41, 25, 25});
    srf::ScalarField f(g);
    srf::Rng rng(1);
    for (auto& v : f.values()) v = rng.uniform(-1.0, 1.0);
    return f;
}

void BM_Interpolate4D(benchmark::State& state) {
    auto f = make_field4d();
    srf::Rng rng(2);
    double pt[4];
    for (auto _ : state) {
        for (int a = 0; a < 4; ++a) {
            pt[a] = rng.uniform(0.9 * f.grid().lower(a), 0.9 * f.grid().upper(a));
        }
        benchmark::DoNotOptimize(f.interpolate(std::span<const double>(pt, 4)));
    }
}
BENCHMARK(BM_Interpolate4D);

void BM_Gradient4D(benchmark::State& state) {
    auto f = make_field4d();
    srf::Rng rng(3);
    double pt[4];
    for (auto _ : state) {
        for (int a = 0; a < 4; ++a) {
            pt[a] = rng.uniform(0.9 * f.grid().lower(a), 0.9 * f.grid().upper(a));
        }
        benchmark::DoNotOptimize(f.gradient(std::span<const double>(pt, 4)));
    }
}
BENCHMARK(BM_Gradient4D);

}  // namespace

BENCHMARK_MAIN();
