#include <benchmark/benchmark.h>

#include "dtt/baselines.hpp"
#include "dtt/densegrid.hpp"
#include "dtt/scalenorm.hpp"
#include "oracles.hpp"

namespace {

using namespace dtt;

Frame textured(int w, int h, std::uint64_t seed, double dx = 0.0) {
  oracle::Rng rng(seed);
  return oracle::Texture::random(rng).render(w, h, dx, 0.0);
}

void BM_ExtractGrid(benchmark::State& state) {
  const int w = static_cast<int>(state.range(0));
  const Frame f = textured(w, w * 3 / 4, 1);
  for (auto _ : state) benchmark::DoNotOptimize(extract_grid(f));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(grid_loci(f.width(), f.height(), {}).size()));
}
BENCHMARK(BM_ExtractGrid)->Arg(128)->Arg(192)->Unit(benchmark::kMillisecond);

void BM_ComputeFlow(benchmark::State& state) {
  const int w = static_cast<int>(state.range(0));
  const Frame a = textured(w, w * 3 / 4, 2);
  const Frame b = textured(w, w * 3 / 4, 2, 1.5);
  for (auto _ : state) benchmark::DoNotOptimize(compute_flow(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(a.size()));
}
BENCHMARK(BM_ComputeFlow)->Arg(128)->Arg(192)->Unit(benchmark::kMillisecond);

void BM_NormalizeSequence(benchmark::State& state) {
  std::vector<Frame> frames;
  for (int n = 0; n < 8; ++n) frames.push_back(textured(128, 96, 3, 0.7 * n));
  const VideoSequence seq("bench", frames);
  for (auto _ : state) benchmark::DoNotOptimize(normalize_sequence(seq));
}
BENCHMARK(BM_NormalizeSequence)->Unit(benchmark::kMillisecond);

void BM_MaxMaxCosine(benchmark::State& state) {
  oracle::Rng rng(4);
  const auto n = static_cast<std::size_t>(state.range(0));
  const FeatureSet a = oracle::random_feature_set(rng, n, 128);
  const FeatureSet b = oracle::random_feature_set(rng, n, 128);
  for (auto _ : state) benchmark::DoNotOptimize(maxmax_cosine(a, b));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(n * n));
}
BENCHMARK(BM_MaxMaxCosine)->Arg(500)->Arg(4000)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
