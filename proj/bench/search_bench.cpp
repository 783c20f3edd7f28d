// Decision-round cost of the three search kernels over window size n.
//
// The serial enumeration is the reference; the OpenMP variant splits the
// same 2^n candidates across threads; the DP is what the simulator runs.

#include <random>
#include <vector>

#include <benchmark/benchmark.h>

#include "deltaq/dataset.hpp"
#include "deltaq/delta_search.hpp"
#include "deltaq/latency_model.hpp"

namespace {

using namespace deltaq;

const ConditionalLatencyModel& model() {
  static const ConditionalLatencyModel m = [] {
    TrainingScenario sc;
    return fit_latency_model(collect_dataset(sc, 4096), FitOptions{});
  }();
  return m;
}

std::vector<SuccessTable> tables(std::size_t n) {
  std::mt19937_64 gen(n);
  std::uniform_real_distribution<double> budget(0.0, 120.0);
  std::vector<SuccessTable> out(32);
  for (auto& t : out) {
    std::vector<double> b(n);
    for (double& v : b) v = budget(gen);
    t.fill(b, model(), 0);
  }
  return out;
}

template <SearchResult (*Kernel)(const SuccessTable&)>
void run(benchmark::State& state) {
  const auto ts = tables(static_cast<std::size_t>(state.range(0)));
  std::size_t i = 0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(Kernel(ts[i++ % ts.size()]).score);
  }
  state.SetComplexityN(state.range(0));
}

}  // namespace

BENCHMARK(run<search_enumerate>)->Name("enumerate/serial")->DenseRange(4, 15, 1);
BENCHMARK(run<search_enumerate_parallel>)->Name("enumerate/openmp")->DenseRange(4, 15, 1);
BENCHMARK(run<search_dynamic>)->Name("dynamic_program")->DenseRange(4, 15, 1);

BENCHMARK_MAIN();
