#include <benchmark/benchmark.h>

#include "srf/solver.hpp"

namespace {

// Full two-stage vertical-subsystem solve at the default resolution; the
// dominant cost is the per-node sweep kernel.
void BM_VerticalSolve(benchmark::State& state) {
    srf::ModelParams params;
    srf::ControlBounds bounds;
    auto model = srf::vertical_subsystem(params, bounds.uz, bounds.planner_vmax, 0.0);
    srf::Grid grid({-2.0, -2.0}, {2.0, 2.0}, {static_cast<std::size_t>(state.range(0)),
                                              static_cast<std::size_t>(state.range(0))});
    srf::SolveConfig cfg;
    cfg.gamma = 0.5;
    cfg.tolerance = 1e-3;
    for (auto _ : state) {
        auto stage1 = srf::solve_converged_value(model, grid, cfg);
        auto stage2 = srf::solve_rclvf(model, grid, cfg, stage1.minval);
        benchmark::DoNotOptimize(stage2.minval);
    }
}
BENCHMARK(BM_VerticalSolve)->Arg(41)->Arg(81)->Unit(benchmark::kMillisecond);

void BM_Hamiltonian(benchmark::State& state) {
    srf::ModelParams params;
    srf::ControlBounds bounds;
    auto model = srf::lateral_subsystem(params, bounds.ux, bounds.planner_vmax, 0.1);
    const double r[4] = {0.5, -0.25, 0.1, 0.2};
    const double q[4] = {1.0, -2.0, 0.5, 0.7};
    for (auto _ : state) {
        benchmark::DoNotOptimize(srf::hamiltonian(model, std::span<const double>(r, 4),
                                                  std::span<const double>(q, 4)));
    }
}
BENCHMARK(BM_Hamiltonian);

}  // namespace
