#include <benchmark/benchmark.h>

#include "srf/rrt.hpp"

namespace {

void BM_RrtSlalomPlan(benchmark::State& state) {
    srf::Box ws{2, {-1.0, -4.0, 0.0}, {21.0, 4.0, 0.0}};
    std::vector<srf::Box> obstacles = {
        srf::Box{2, {5.0, -4.0, 0.0}, {7.0, 1.0, 0.0}},
        srf::Box{2, {10.0, -1.0, 0.0}, {12.0, 4.0, 0.0}},
        srf::Box{2, {15.0, -4.0, 0.0}, {17.0, 1.0, 0.0}},
    };
    srf::OccupancyMap map(ws, 0.05, 3.0, obstacles);
    map.sense(srf::PVec{2, {6.0, 2.0, 0.0}});
    map.sense(srf::PVec{2, {11.0, -2.0, 0.0}});
    map.sense(srf::PVec{2, {16.0, 2.0, 0.0}});
    srf::PlannerExtents pad;
    pad.dim = 2;
    pad.lo = {-0.5, -0.5, 0.0};
    pad.hi = {0.5, 0.5, 0.0};
    map.augment(pad);

    std::uint64_t seed = 1;
    for (auto _ : state) {
        auto path = srf::rrt_plan(map, srf::PVec{2, {0.0, 0.0, 0.0}},
                                  srf::PVec{2, {20.0, 0.0, 0.0}}, seed++);
        benchmark::DoNotOptimize(path);
    }
}
BENCHMARK(BM_RrtSlalomPlan)->Unit(benchmark::kMillisecond);

}  // namespace
