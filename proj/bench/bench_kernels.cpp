#include <benchmark/benchmark.h>

#include "hydrostat/optimizer.hpp"

using namespace hydrostat;

namespace {

const OffsetProblem& walk_problem() {
    static const OffsetProblem p = [] {
        auto q = make_offset_problem(make_scenario(synth_profile(Task::Walk)), DesignVariant::B());
        return q;
    }();
    return p;
}

void BM_GridScanSerial(benchmark::State& state) {
    const double res = 1.0 / static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(grid_scan_serial(walk_problem(), res));
}

void BM_GridScanParallel(benchmark::State& state) {
    const double res = 1.0 / static_cast<double>(state.range(0));
    for (auto _ : state) benchmark::DoNotOptimize(grid_scan(walk_problem(), res));
}

void BM_OptimalOffset(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(optimal_offset(walk_problem()));
}

}  // namespace

BENCHMARK(BM_GridScanSerial)->Arg(100)->Arg(1000);
BENCHMARK(BM_GridScanParallel)->Arg(100)->Arg(1000);
BENCHMARK(BM_OptimalOffset);

BENCHMARK_MAIN();
