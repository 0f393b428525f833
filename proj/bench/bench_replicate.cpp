#include <benchmark/benchmark.h>

#include <omp.h>

#include "uexp/estimators.hpp"
#include "uexp/montecarlo.hpp"
#include "uexp/oracle.hpp"
#include "uexp/sample.hpp"

namespace {

uexp::McConfig bench_config(std::int64_t n, std::int64_t chunks) {
    uexp::McConfig c;
    c.replications = 200000;
    c.n = n;
    c.lambda = 1.0;
    c.seed = 17;
    c.parallel_chunks = chunks;
    return c;
}

const uexp::ReplicationStatistic kSurvival = [](std::span<const double> x, std::span<double> out) {
    out[0] = uexp::survival(uexp::compensated_mean(x), static_cast<std::int64_t>(x.size()), 1.0);
};

void BM_ReplicateSerial(benchmark::State& state) {
    const auto config = bench_config(state.range(0), 1);
    for (auto _ : state) {
        benchmark::DoNotOptimize(uexp::replicate_serial(config, 1, kSurvival));
    }
    state.SetItemsProcessed(state.iterations() * config.replications);
}

void BM_ReplicateParallel(benchmark::State& state) {
    const auto config = bench_config(state.range(0), omp_get_max_threads());
    for (auto _ : state) {
        benchmark::DoNotOptimize(uexp::replicate_parallel(config, 1, kSurvival));
    }
    state.SetItemsProcessed(state.iterations() * config.replications);
    state.counters["threads"] = static_cast<double>(config.parallel_chunks);
}

void BM_OracleSweep(benchmark::State& state) {
    std::vector<uexp::GridCell> cells;
    for (std::int64_t n : {1, 2, 5, 10, 30})
        for (double t : {0.5, 1.0, 2.0}) cells.push_back({uexp::FunctionalSpec::mean_past_lifetime(t), n, 1.0});
    const auto exec = state.range(0) ? uexp::Execution::with_threads(omp_get_max_threads()) : uexp::Execution::serial();
    for (auto _ : state) {
        benchmark::DoNotOptimize(uexp::verify_sweep(cells, 1e-10, false, exec));
    }
}

}  // namespace

BENCHMARK(BM_ReplicateSerial)->Arg(5)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_ReplicateParallel)->Arg(5)->Arg(50)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_OracleSweep)->Arg(0)->Arg(1)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
