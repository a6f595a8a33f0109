#include <benchmark/benchmark.h>

#include "visbp/algorithms.hpp"
#include "visbp/brokersim.hpp"
#include "visbp/streamgen.hpp"

namespace {

void BM_RunSimulation(benchmark::State& state) {
    visbp::StreamConfig sc;
    sc.partitions = 32;
    sc.iterations = static_cast<std::size_t>(state.range(0));
    sc.delta = 25;
    sc.seed = 7;
    const auto stream = visbp::generate_stream(sc);
    visbp::sim::SimConfig cfg;
    cfg.packer = visbp::parse_algorithm("mwf", 1.0);
    cfg.saturated = state.range(1) != 0;
    for (auto _ : state) {
        auto r = visbp::sim::run_simulation(stream, cfg);
        benchmark::DoNotOptimize(r.end_time);
    }
}
BENCHMARK(BM_RunSimulation)->Args({20, 0})->Args({20, 1})->Args({100, 0})->Unit(benchmark::kMillisecond);

}  // namespace
