#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "dtt/error.hpp"
#include "dtt/tracker.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

namespace dtt {
namespace {

using oracle::Rng;

void expect_same_tracks(const std::vector<Track>& got, const std::vector<Track>& want) {
  ASSERT_EQ(got.size(), want.size());
  for (std::size_t t = 0; t < got.size(); ++t) {
    EXPECT_EQ(got[t].steps, want[t].steps) << "track " << t;
    EXPECT_EQ(got[t].log_likelihood, want[t].log_likelihood) << "track " << t;
    EXPECT_EQ(got[t].mean_log, want[t].mean_log) << "track " << t;
  }
}

double stay_in_place_score(std::span<const WordGrid> grids, const TransitionTable& table, int x, int y) {
  double s = 0.0;
  for (std::size_t n = 0; n + 1 < grids.size(); ++n) s += table.log_prob(grids[n].at(x, y), grids[n + 1].at(x, y));
  return s;
}

TEST(InferTracks, SingleFrameGivesOneStepTracks) {
  Rng rng(1);
  const std::vector<WordGrid> grids{oracle::random_word_grid(rng, 4, 3, 5)};
  const auto tracks = infer_tracks(grids, oracle::random_table(rng, 5));
  ASSERT_EQ(tracks.size(), 12U);
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    ASSERT_EQ(tracks[i].size(), 1U);
    EXPECT_EQ(tracks[i].log_likelihood, 0.0);
    EXPECT_EQ(tracks[i].mean_log, 0.0);
    EXPECT_EQ(tracks[i].steps[0].x, static_cast<int>(i % 4));
    EXPECT_EQ(tracks[i].steps[0].y, static_cast<int>(i / 4));
    EXPECT_EQ(tracks[i].steps[0].word, grids[0].at(static_cast<int>(i % 4), static_cast<int>(i / 4)));
  }
}

TEST(InferTracks, ThreeFramesFourByFourMatchExhaustiveEnumeration) {
  Rng rng(2);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<WordGrid> grids;
    for (int f = 0; f < 3; ++f) grids.push_back(oracle::random_word_grid(rng, 4, 4, 4));
    const TransitionTable table = oracle::random_table(rng, 4);
    expect_same_tracks(infer_tracks(grids, table), oracle::exhaustive_tracks(grids, table));
  }
}

TEST(InferTracks, SmallLatticesMatchExhaustiveEnumeration) {
  Rng rng(3);
  for (int trial = 0; trial < 30; ++trial) {
    const int frames = oracle::uniform_int(rng, 1, 4);
    const int w = oracle::uniform_int(rng, 1, 5);
    const int h = oracle::uniform_int(rng, 1, 5);
    const int k = oracle::uniform_int(rng, 2, 6);
    std::vector<WordGrid> grids;
    for (int f = 0; f < frames; ++f) grids.push_back(oracle::random_word_grid(rng, w, h, k));
    const TransitionTable table = oracle::random_table(rng, k, trial % 2 ? 2 : 8);
    expect_same_tracks(infer_tracks(grids, table), oracle::exhaustive_tracks(grids, table));
  }
}

TEST(InferTracks, UniformTableTiesGoToSmallestSuccessor) {
  Rng rng(4);
  std::vector<WordGrid> grids;
  for (int f = 0; f < 3; ++f) grids.push_back(oracle::random_word_grid(rng, 3, 3, 3));
  const auto tracks = infer_tracks(grids, TransitionTable::uniform(3, 1.0 / 3.0));
  // Every path scores 2 log(1/3); the smallest (y, x) neighbour of (1,1) is (0,0).
  const Track& centre = tracks[4];
  EXPECT_EQ(centre.steps[1].x, 0);
  EXPECT_EQ(centre.steps[1].y, 0);
  EXPECT_EQ(centre.steps[2].x, 0);
  EXPECT_EQ(centre.steps[2].y, 0);
  EXPECT_NEAR(centre.log_likelihood, 2.0 * std::log(1.0 / 3.0), 1e-12);
}

TEST(InferTracks, ConstantVideoWithDominantDiagonalStaysInPlace) {
  Rng rng(5);
  const int k = 6;
  std::vector<std::uint32_t> counts(static_cast<std::size_t>(k) * k, 1);
  for (int j = 0; j < k; ++j) counts[static_cast<std::size_t>(j * k + j)] = 50;
  const TransitionTable table(k, counts, 1.0 / k);
  // Neighbouring cells all carry different words, so moving always costs a
  // non-diagonal transition.
  std::vector<std::int32_t> words;
  for (int y = 0; y < 5; ++y)
    for (int x = 0; x < 5; ++x) words.push_back((x + 3 * y) % k);
  const WordGrid g = oracle::word_grid(5, 5, k, words);
  const std::vector<WordGrid> grids{g, g, g, g};
  const auto tracks = infer_tracks(grids, table);
  expect_same_tracks(tracks, oracle::exhaustive_tracks(grids, table));
  for (std::size_t i = 0; i < tracks.size(); ++i)
    for (const auto& s : tracks[i].steps) {
      EXPECT_EQ(s.x, static_cast<int>(i % 5));
      EXPECT_EQ(s.y, static_cast<int>(i / 5));
    }
}

TEST(InferTracks, InvariantsOnLargerGrids) {
  Rng rng(6);
  const int k = 40;
  std::vector<WordGrid> grids;
  for (int f = 0; f < 8; ++f) grids.push_back(oracle::random_word_grid(rng, 17, 11, k));
  const TransitionTable table = oracle::random_table(rng, k, 3);
  const auto tracks = infer_tracks(grids, table);
  ASSERT_EQ(tracks.size(), 17U * 11U);
  for (std::size_t t = 0; t < tracks.size(); ++t) {
    const Track& tr = tracks[t];
    ASSERT_EQ(tr.size(), grids.size());
    EXPECT_EQ(tr.steps[0].x, static_cast<int>(t % 17));
    EXPECT_EQ(tr.steps[0].y, static_cast<int>(t / 17));
    for (std::size_t n = 0; n < tr.size(); ++n) {
      EXPECT_EQ(tr.steps[n].word, grids[n].at(tr.steps[n].x, tr.steps[n].y));
      if (n > 0) {
        EXPECT_LE(std::hypot(tr.steps[n].x - tr.steps[n - 1].x, tr.steps[n].y - tr.steps[n - 1].y), std::sqrt(2.0) + 1e-12);
      }
    }
    EXPECT_TRUE(std::isfinite(tr.log_likelihood));
    EXPECT_GE(tr.log_likelihood, stay_in_place_score(grids, table, tr.steps[0].x, tr.steps[0].y) - 1e-9);
    EXPECT_DOUBLE_EQ(tr.mean_log, tr.log_likelihood / 7.0);
    Track copy = tr;
    score_track(copy, table);
    EXPECT_EQ(copy.log_likelihood, tr.log_likelihood);
  }
}

TEST(InferTracks, IsDeterministic) {
  Rng rng(7);
  std::vector<WordGrid> grids;
  for (int f = 0; f < 5; ++f) grids.push_back(oracle::random_word_grid(rng, 9, 7, 5));
  const TransitionTable table = oracle::random_table(rng, 5, 2);
  expect_same_tracks(infer_tracks(grids, table), infer_tracks(grids, table));
}

TEST(InferTracks, InvalidInputsThrow) {
  Rng rng(8);
  const TransitionTable table = oracle::random_table(rng, 3);
  EXPECT_THROW(infer_tracks(std::vector<WordGrid>{}, table), InvalidArgument);
  const std::vector<WordGrid> too_many_words{oracle::random_word_grid(rng, 2, 2, 5), oracle::random_word_grid(rng, 2, 2, 5)};
  std::vector<WordGrid> big = too_many_words;
  big[0].words[0] = 4;
  EXPECT_THROW(infer_tracks(big, table), InvalidArgument);
  const std::vector<WordGrid> mixed{oracle::random_word_grid(rng, 2, 2, 3), oracle::random_word_grid(rng, 3, 2, 3)};
  EXPECT_THROW(infer_tracks(mixed, table), DimensionMismatch);
}

TEST(ScoreTrack, SumsLogTransitions) {
  Rng rng(9);
  const TransitionTable table = oracle::random_table(rng, 4);
  Track t;
  t.steps = {{0, 0, 0}, {3, 1, 0}, {1, 1, 1}};
  score_track(t, table);
  EXPECT_DOUBLE_EQ(t.log_likelihood, table.log_prob(0, 3) + table.log_prob(3, 1));
  EXPECT_DOUBLE_EQ(t.mean_log, t.log_likelihood / 2.0);
}

TEST(ExportTracksCsv, OneRowPerStep) {
  TempDir dir("tracks");
  Rng rng(10);
  std::vector<WordGrid> grids;
  for (int f = 0; f < 3; ++f) grids.push_back(oracle::random_word_grid(rng, 2, 2, 3));
  const auto tracks = infer_tracks(grids, oracle::random_table(rng, 3));
  export_tracks_csv(dir.path() / "t.csv", tracks);
  std::ifstream in(dir.path() / "t.csv");
  std::string header;
  std::getline(in, header);
  EXPECT_EQ(header, "track,frame,x,y,word");
  int rows = 0;
  for (std::string line; std::getline(in, line);) ++rows;
  EXPECT_EQ(rows, 4 * 3);
}

}  // namespace
}  // namespace dtt
