// Serial reference sweep vs the OpenMP cell-parallel sweep on the default
// Zipf trace. Cells are independent, so the parallel sweep scales with
// cores up to the 15-cell plan size.

#include <benchmark/benchmark.h>

#include <memory>

#include "toolcache/simulator.hpp"
#include "toolcache/workload.hpp"

namespace {

using namespace toolcache;

const Trace& bench_trace() {
    static const Trace t = [] {
        WorkloadConfig w;
        w.n_requests = 5000;
        return generate(default_catalog(), w);
    }();
    return t;
}

void BM_SweepSerial(benchmark::State& state) {
    SweepSpec spec;
    for (auto _ : state) {
        auto r = run_sweep_serial(bench_trace(), spec, std::make_shared<TraceAnnotator>());
        benchmark::DoNotOptimize(r.cells.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(bench_trace().size() * 15));
}

void BM_SweepParallel(benchmark::State& state) {
    SweepSpec spec;
    spec.threads = static_cast<int>(state.range(0));
    for (auto _ : state) {
        auto r = run_sweep(bench_trace(), spec, std::make_shared<TraceAnnotator>());
        benchmark::DoNotOptimize(r.cells.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(bench_trace().size() * 15));
}

}  // namespace

BENCHMARK(BM_SweepSerial)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_SweepParallel)->Arg(1)->Arg(2)->Arg(4)->Arg(0)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
