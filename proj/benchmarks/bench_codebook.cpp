#include <benchmark/benchmark.h>

#include "dtt/codebook.hpp"
#include "oracles.hpp"

namespace {

using namespace dtt;

std::vector<float> random_data(std::size_t n, int dim, std::uint64_t seed) {
  oracle::Rng rng(seed);
  std::vector<float> data(n * static_cast<std::size_t>(dim));
  for (float& v : data) v = static_cast<float>(oracle::uniform(rng, 0.0, 1.0));
  return data;
}

void BM_TrainCodebook(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const auto data = random_data(20000, 128, 1);
  for (auto _ : state) {
    benchmark::DoNotOptimize(train_codebook(data, 128, k, 7, {.max_iterations = 10, .tolerance = 0.0}));
  }
}
BENCHMARK(BM_TrainCodebook)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond)->Iterations(1);

void BM_AssignNearest(benchmark::State& state) {
  const int k = static_cast<int>(state.range(0));
  const Codebook cb = train_codebook(random_data(5000, 128, 2), 128, k, 7, {.max_iterations = 3});
  const auto queries = random_data(5000, 128, 3);
  for (auto _ : state) benchmark::DoNotOptimize(assign_nearest(queries, 128, cb));
  state.SetItemsProcessed(state.iterations() * 5000);
}
BENCHMARK(BM_AssignNearest)->Arg(100)->Arg(500)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
