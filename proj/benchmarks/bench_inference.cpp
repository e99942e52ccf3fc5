#include <benchmark/benchmark.h>

#include "dtt/segcut.hpp"
#include "dtt/tracker.hpp"
#include "dtt/transition_table.hpp"
#include "oracles.hpp"

namespace {

using namespace dtt;

std::vector<WordGrid> random_video(oracle::Rng& rng, int gw, int gh, int k, int frames) {
  std::vector<WordGrid> grids;
  for (int f = 0; f < frames; ++f) grids.push_back(oracle::random_word_grid(rng, gw, gh, k));
  return grids;
}

void BM_LearnDtt(benchmark::State& state) {
  oracle::Rng rng(1);
  const int k = 500;
  const auto grids = random_video(rng, 55, 39, k, 8);
  std::vector<FramePair> pairs;
  for (std::size_t a = 0; a < 8; ++a)
    for (std::size_t b = 0; b < 8; ++b)
      if (a != b) pairs.push_back({a, b});
  for (auto _ : state) benchmark::DoNotOptimize(learn_dtt(grids, {}, pairs, k, default_alpha(k)));
}
BENCHMARK(BM_LearnDtt)->Unit(benchmark::kMillisecond);

void BM_InferTracks(benchmark::State& state) {
  oracle::Rng rng(2);
  const int k = 500;
  const auto grids = random_video(rng, 55, 39, k, static_cast<int>(state.range(0)));
  const TransitionTable table = oracle::random_table(rng, k, 4);
  for (auto _ : state) benchmark::DoNotOptimize(infer_tracks(grids, table));
  state.SetItemsProcessed(state.iterations() * 55 * 39);
}
BENCHMARK(BM_InferTracks)->Arg(4)->Arg(8)->Unit(benchmark::kMillisecond);

void BM_BuildAndSegment(benchmark::State& state) {
  oracle::Rng rng(3);
  const int k = 50;
  const auto grids = random_video(rng, 55, 39, k, 8);
  const auto tracks = infer_tracks(grids, oracle::random_table(rng, k, 4));
  for (auto _ : state) benchmark::DoNotOptimize(segment(build_graph(tracks)));
  state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(tracks.size()));
}
BENCHMARK(BM_BuildAndSegment)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
