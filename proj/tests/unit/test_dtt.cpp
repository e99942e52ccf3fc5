#include <gtest/gtest.h>

#include <algorithm>
#include <fstream>
#include <numeric>

#include "dtt/error.hpp"
#include "dtt/ingest.hpp"
#include "dtt/transition_table.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

namespace dtt {
namespace {

using oracle::Rng;

void expect_rows_stochastic(const TransitionTable& t) {
  for (int j = 0; j < t.k(); ++j) {
    double sum = 0.0;
    for (int i = 0; i < t.k(); ++i) {
      EXPECT_GT(t.prob(j, i), 0.0);
      sum += t.prob(j, i);
    }
    EXPECT_NEAR(sum, 1.0, 1e-9) << "row " << j;
  }
}

std::vector<FramePair> all_pairs(std::size_t n) {
  std::vector<FramePair> p;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (i != j) p.push_back({i, j});
  return p;
}

TEST(SuccessivePairs, DefaultThreshold) { EXPECT_DOUBLE_EQ(kDefaultSuccessionThreshold, 0.1); }

TEST(SuccessivePairs, IdenticalFramesGiveBothOrders) {
  Rng rng(1);
  const Frame f = oracle::random_frame(rng, 16, 12);
  const std::vector<Frame> frames{f, f};
  const auto pairs = possibly_successive_pairs(frames, kDefaultSuccessionThreshold);
  EXPECT_EQ(pairs, (std::vector<FramePair>{{0, 1}, {1, 0}}));
}

TEST(SuccessivePairs, ThreeFrameConstruction) {
  std::vector<float> alt(8 * 8);
  for (std::size_t i = 0; i < alt.size(); ++i) alt[i] = i % 2 ? 0.525F : 0.475F;
  const std::vector<Frame> frames{Frame(8, 8, 0.5F), Frame(8, 8, alt), Frame(8, 8, 0.6F)};
  // The construction gives d01 = 0.05 and d02 = d12 = 0.2 (to 3 %) by a direct norm.
  EXPECT_NEAR(oracle::direct_frame_distance(frames[0], frames[1]), 0.05, 1e-6);
  EXPECT_NEAR(oracle::direct_frame_distance(frames[0], frames[2]), 0.2, 1e-6);
  EXPECT_NEAR(oracle::direct_frame_distance(frames[1], frames[2]), 0.2, 0.01);
  for (std::size_t i = 0; i < 3; ++i)
    for (std::size_t j = 0; j < 3; ++j)
      if (i != j && (i + j) != 1) EXPECT_GT(oracle::direct_frame_distance(frames[i], frames[j]), 0.1);
  EXPECT_LE(oracle::direct_frame_distance(frames[1], frames[0]), 0.1);
  const auto pairs = possibly_successive_pairs(frames, 0.1);
  EXPECT_EQ(pairs, (std::vector<FramePair>{{0, 1}, {1, 0}}));
}

TEST(SuccessivePairs, MatchesDirectThresholding) {
  Rng rng(2);
  std::vector<Frame> frames;
  const auto tex = oracle::Texture::random(rng);
  for (int i = 0; i < 7; ++i) frames.push_back(tex.render(30, 20, oracle::uniform(rng, 0, 3), 0));
  for (double t : {0.02, 0.05, 0.1, 0.2}) {
    std::vector<FramePair> expected;
    for (std::size_t i = 0; i < frames.size(); ++i)
      for (std::size_t j = 0; j < frames.size(); ++j)
        if (i != j && oracle::direct_frame_distance(frames[i], frames[j]) <= t) expected.push_back({i, j});
    auto got = possibly_successive_pairs(frames, t);
    std::sort(got.begin(), got.end());
    EXPECT_EQ(got, expected) << "t " << t;
  }
}

TEST(SuccessivePairs, EnlargingThresholdOnlyAddsPairs) {
  Rng rng(3);
  std::vector<Frame> frames;
  for (int i = 0; i < 6; ++i) frames.push_back(oracle::random_frame(rng, 10, 10, 0.3, 0.7));
  std::vector<FramePair> previous;
  for (double t = 0.05; t <= 0.6; t += 0.05) {
    auto pairs = possibly_successive_pairs(frames, t);
    std::sort(pairs.begin(), pairs.end());
    EXPECT_TRUE(std::includes(pairs.begin(), pairs.end(), previous.begin(), previous.end()));
    previous = pairs;
  }
  EXPECT_THROW(possibly_successive_pairs(frames, 0.0), InvalidArgument);
}

TEST(LearnDtt, NoPairsGivesUniformRows) {
  Rng rng(4);
  const std::vector<WordGrid> grids{oracle::random_word_grid(rng, 3, 3, 5)};
  const TransitionTable t = learn_dtt(grids, {}, {}, 5, default_alpha(5));
  for (int j = 0; j < 5; ++j)
    for (int i = 0; i < 5; ++i) EXPECT_NEAR(t.prob(j, i), 0.2, 1e-15);
  EXPECT_EQ(t, TransitionTable::uniform(5, 0.2));
}

TEST(LearnDtt, TwoFrameHandExample) {
  const std::vector<WordGrid> grids{oracle::word_grid(2, 2, 3, {0, 1, 1, 2}), oracle::word_grid(2, 2, 3, {0, 1, 2, 2})};
  const std::vector<FramePair> pairs{{0, 1}, {1, 0}};
  const TransitionTable t = learn_dtt(grids, {}, pairs, 3, default_alpha(3));
  const std::vector<std::uint32_t> expected{2, 0, 0,  //
                                            0, 2, 1,  //
                                            0, 1, 2};
  EXPECT_EQ(std::vector<std::uint32_t>(t.counts().begin(), t.counts().end()), expected);
  const double a = 1.0 / 3.0;
  for (int j = 0; j < 3; ++j) {
    const double total = std::accumulate(expected.begin() + j * 3, expected.begin() + j * 3 + 3, 0.0);
    for (int i = 0; i < 3; ++i) {
      EXPECT_NEAR(t.prob(j, i), (expected[static_cast<std::size_t>(j * 3 + i)] + a) / (total + 3 * a), 1e-15);
      EXPECT_NEAR(t.log_prob(j, i), std::log(t.prob(j, i)), 1e-12);
    }
  }
  EXPECT_EQ(t.row_total(1), 3U);
  expect_rows_stochastic(t);
}

TEST(LearnDtt, MatchesDirectEnumerationWithMasks) {
  Rng rng(5);
  for (int trial = 0; trial < 20; ++trial) {
    const int k = oracle::uniform_int(rng, 2, 9);
    const int gw = oracle::uniform_int(rng, 1, 6);
    const int gh = oracle::uniform_int(rng, 1, 6);
    const std::size_t n = static_cast<std::size_t>(oracle::uniform_int(rng, 1, 5));
    std::vector<WordGrid> grids;
    std::vector<Mask> masks;
    const int fw = 20 + 2 * (gw - 1);
    const int fh = 20 + 2 * (gh - 1);
    for (std::size_t f = 0; f < n; ++f) {
      grids.push_back(oracle::random_word_grid(rng, gw, gh, k));
      Mask m(fw, fh);
      for (int y = 0; y < fh; ++y)
        for (int x = 0; x < fw; ++x) m.set(x, y, oracle::uniform(rng, 0, 1) < 0.7);
      masks.push_back(m);
    }
    std::vector<FramePair> pairs;
    for (const auto& p : all_pairs(n))
      if (oracle::uniform(rng, 0, 1) < 0.6) pairs.push_back(p);
    const double alpha = oracle::uniform(rng, 0.01, 2.0);
    const TransitionTable t = learn_dtt(grids, masks, pairs, k, alpha);
    const auto direct = oracle::direct_counts(grids, masks, pairs, k);
    for (std::size_t c = 0; c < direct.size(); ++c) ASSERT_EQ(t.counts()[c], direct[c]);
    expect_rows_stochastic(t);
    for (int j = 0; j < k; ++j) {
      std::uint64_t total = 0;
      for (int i = 0; i < k; ++i) total += direct[static_cast<std::size_t>(j * k + i)];
      for (int i = 0; i < k; ++i)
        EXPECT_NEAR(t.prob(j, i), (direct[static_cast<std::size_t>(j * k + i)] + alpha) / (total + k * alpha), 1e-12);
    }
  }
}

TEST(LearnDtt, MaskUsesThePatchCentreInBothFrames) {
  const std::vector<WordGrid> grids{oracle::word_grid(2, 1, 2, {0, 1}), oracle::word_grid(2, 1, 2, {1, 0})};
  Mask m0(22, 20), m1(22, 20);
  // Locus (0,0) has its centre at (10,10); locus (2,0) at (12,10).
  m0.set(10, 10, true);
  m1.set(10, 10, true);
  m0.set(12, 10, true);
  const std::vector<Mask> masks{m0, m1};
  const std::vector<FramePair> pairs{{0, 1}};
  const TransitionTable t = learn_dtt(grids, masks, pairs, 2, 0.5);
  EXPECT_EQ(t.count(0, 1), 1U);
  EXPECT_EQ(t.count(1, 0), 0U);
  EXPECT_EQ(t.row_total(1), 0U);
}

TEST(LearnDtt, ReversedPairSetGivesTransposedCounts) {
  Rng rng(6);
  const int k = 6;
  std::vector<WordGrid> grids;
  for (int f = 0; f < 4; ++f) grids.push_back(oracle::random_word_grid(rng, 5, 4, k));
  const std::vector<FramePair> pairs{{0, 1}, {2, 3}, {1, 3}, {3, 0}};
  std::vector<FramePair> reversed;
  for (const auto& p : pairs) reversed.push_back({p.to, p.from});
  const TransitionTable a = learn_dtt(grids, {}, pairs, k, 1.0 / k);
  const TransitionTable b = learn_dtt(grids, {}, reversed, k, 1.0 / k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) EXPECT_EQ(a.count(j, i), b.count(i, j));
  // The union of both directions is symmetric.
  std::vector<FramePair> both = pairs;
  both.insert(both.end(), reversed.begin(), reversed.end());
  const TransitionTable s = learn_dtt(grids, {}, both, k, 1.0 / k);
  for (int j = 0; j < k; ++j)
    for (int i = 0; i < k; ++i) EXPECT_EQ(s.count(j, i), s.count(i, j));
}

TEST(LearnDtt, FrameOrderDoesNotMatter) {
  Rng rng(7);
  const int k = 5;
  std::vector<WordGrid> grids;
  for (int f = 0; f < 5; ++f) grids.push_back(oracle::random_word_grid(rng, 3, 3, k));
  const std::vector<FramePair> pairs{{0, 1}, {1, 0}, {2, 4}, {3, 1}};
  const std::vector<std::size_t> perm{3, 0, 4, 1, 2};  // new position of old frame f
  std::vector<WordGrid> permuted(grids.size());
  for (std::size_t f = 0; f < grids.size(); ++f) permuted[perm[f]] = grids[f];
  std::vector<FramePair> mapped;
  for (const auto& p : pairs) mapped.push_back({perm[p.from], perm[p.to]});
  std::reverse(mapped.begin(), mapped.end());
  EXPECT_EQ(learn_dtt(grids, {}, pairs, k, 0.2), learn_dtt(permuted, {}, mapped, k, 0.2));
}

TEST(LearnDtt, LargerThresholdNeverRemovesCounts) {
  Rng rng(8);
  const auto tex = oracle::Texture::random(rng);
  std::vector<Frame> frames;
  std::vector<WordGrid> grids;
  for (int i = 0; i < 6; ++i) {
    frames.push_back(tex.render(24, 22, 0.7 * i, 0));
    grids.push_back(oracle::random_word_grid(rng, 3, 2, 4));
  }
  std::vector<std::uint32_t> previous(16, 0);
  for (double t : {0.01, 0.03, 0.06, 0.1, 0.2, 0.5}) {
    const TransitionTable table = learn_dtt(grids, {}, possibly_successive_pairs(frames, t), 4, 0.25);
    for (std::size_t c = 0; c < 16; ++c) EXPECT_GE(table.counts()[c], previous[c]);
    previous.assign(table.counts().begin(), table.counts().end());
  }
}

TEST(LearnDtt, InvalidInputsThrow) {
  Rng rng(9);
  const std::vector<WordGrid> grids{oracle::random_word_grid(rng, 2, 2, 3), oracle::random_word_grid(rng, 3, 2, 3)};
  const std::vector<FramePair> pairs{{0, 1}};
  EXPECT_THROW(learn_dtt(grids, {}, pairs, 3, 0.1), DimensionMismatch);
  const std::vector<WordGrid> ok{oracle::random_word_grid(rng, 2, 2, 3), oracle::random_word_grid(rng, 2, 2, 3)};
  const std::vector<FramePair> bad{{0, 2}};
  EXPECT_THROW(learn_dtt(ok, {}, bad, 3, 0.1), InvalidArgument);
  EXPECT_THROW(learn_dtt(ok, {}, pairs, 2, 0.1), InvalidArgument);
  EXPECT_THROW(learn_dtt(ok, std::vector<Mask>{Mask(22, 22)}, pairs, 3, 0.1), InvalidArgument);
  EXPECT_THROW(TransitionTable(2, {1, 2, 3}, 0.5), InvalidArgument);
  EXPECT_THROW(TransitionTable(2, {1, 2, 3, 4}, 0.0), InvalidArgument);
}

TEST(TransitionTableFile, RoundTripRecomputesProbabilities) {
  TempDir dir("dtt1");
  Rng rng(10);
  const TransitionTable t = oracle::random_table(rng, 7, 20);
  save_transition_table(dir.path() / "t.dtt", t);
  const TransitionTable back = load_transition_table(dir.path() / "t.dtt");
  EXPECT_EQ(back, t);
  for (int j = 0; j < 7; ++j)
    for (int i = 0; i < 7; ++i) EXPECT_EQ(back.log_prob(j, i), t.log_prob(j, i));
}

TEST(TransitionTableFile, BadMagicAndTruncation) {
  TempDir dir("dtt1_bad");
  std::ofstream(dir.path() / "x.dtt") << "XXXX1234567890";
  EXPECT_THROW(load_transition_table(dir.path() / "x.dtt"), FormatError);
  Rng rng(11);
  save_transition_table(dir.path() / "t.dtt", oracle::random_table(rng, 4));
  std::filesystem::resize_file(dir.path() / "t.dtt", 30);
  EXPECT_THROW(load_transition_table(dir.path() / "t.dtt"), FormatError);
  EXPECT_THROW(load_transition_table(dir.path() / "missing.dtt"), FormatError);
}

}  // namespace
}  // namespace dtt
