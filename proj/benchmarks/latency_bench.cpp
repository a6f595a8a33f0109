#include <benchmark/benchmark.h>

#include "visbp/algorithms.hpp"
#include "visbp/latency.hpp"
#include "visbp/streamgen.hpp"

namespace {

void BM_LatencyExperiment(benchmark::State& state, const char* name) {
    visbp::StreamConfig sc;
    sc.partitions = 32;
    sc.iterations = 100;
    sc.delta = 25;
    sc.seed = 4;
    const auto stream = visbp::scale_stream(visbp::generate_stream(sc), 1000);
    visbp::LatencyConfig cfg;
    cfg.consumer_capacity = 1200;
    const double cap = visbp::bin_capacity_bound(cfg.consumer_capacity, cfg.iteration_secs, cfg.rebalance_secs);
    const auto spec = visbp::parse_algorithm(name, cap);
    for (auto _ : state) {
        auto r = visbp::run_latency_experiment(stream, spec, cfg);
        benchmark::DoNotOptimize(r.distribution.percentile(90));
    }
}
BENCHMARK_CAPTURE(BM_LatencyExperiment, mwf, "mwf")->Unit(benchmark::kMillisecond);
BENCHMARK_CAPTURE(BM_LatencyExperiment, kafka_16, "kafka_16")->Unit(benchmark::kMillisecond);

}  // namespace
