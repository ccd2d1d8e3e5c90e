#include <benchmark/benchmark.h>

#include "twinsim/toa.hpp"

namespace {

void BM_SimulateHistogram(benchmark::State& state) {
  twinsim::toa::ToAConfig cfg;
  cfg.rep_rate = 76e6;
  cfg.p = 0.0079;
  cfg.eta_start = 0.305;
  cfg.eta_stop = 0.305;
  cfg.dark_rate = 1000.0;
  cfg.duration = static_cast<double>(state.range(0));
  cfg.seed = 1;
  for (auto _ : state) {
    auto hist = twinsim::toa::simulate_histogram(cfg, 1);
    benchmark::DoNotOptimize(hist);
  }
  state.SetItemsProcessed(state.iterations() *
                          static_cast<std::int64_t>(cfg.duration * cfg.rep_rate));
}
BENCHMARK(BM_SimulateHistogram)->Arg(1)->Arg(5)->Unit(benchmark::kMillisecond);

}  // namespace
