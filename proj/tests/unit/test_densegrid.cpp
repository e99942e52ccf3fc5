#include <gtest/gtest.h>

#include <cmath>
#include <fstream>

#include "dtt/densegrid.hpp"
#include "dtt/error.hpp"
#include "oracles.hpp"
#include "temp_dir.hpp"

namespace dtt {
namespace {

using oracle::Rng;

double norm(std::span<const float> v) {
  double s = 0.0;
  for (float x : v) s += static_cast<double>(x) * x;
  return std::sqrt(s);
}

TEST(GridLoci, SinglePatchFrame) {
  const auto loci = grid_loci(20, 20, {});
  ASSERT_EQ(loci.size(), 1U);
  EXPECT_EQ(loci[0], (Locus{0, 0}));
}

TEST(GridLoci, HundredBySixty) {
  const auto shape = grid_shape(100, 60, {});
  EXPECT_EQ(shape.grid_w, 41);
  EXPECT_EQ(shape.grid_h, 21);
  const auto loci = grid_loci(100, 60, {});
  ASSERT_EQ(loci.size(), 41U * 21U);
  EXPECT_EQ(loci[1], (Locus{2, 0}));
  EXPECT_EQ(loci[41], (Locus{0, 2}));
  EXPECT_EQ(loci.back(), (Locus{80, 40}));
}

TEST(GridConfig, DefaultsGiveTenPercentStride) {
  const GridConfig cfg;
  EXPECT_EQ(cfg.patch_size, 20);
  EXPECT_EQ(cfg.stride(), 2);
  EXPECT_DOUBLE_EQ(static_cast<double>(cfg.stride()) / cfg.patch_size, 0.1);
  EXPECT_EQ(cfg.descriptor_size(), 128);
}

TEST(GridConfig, RejectsInvalidConfigurations) {
  EXPECT_THROW((GridConfig{.patch_size = 20, .stride_ratio = 0.0}.validate()), InvalidArgument);
  EXPECT_THROW((GridConfig{.patch_size = 20, .stride_ratio = 1.5}.validate()), InvalidArgument);
  EXPECT_THROW((GridConfig{.patch_size = 4, .stride_ratio = 0.1}.validate()), InvalidArgument);
  EXPECT_THROW((GridConfig{.patch_size = 18, .stride_ratio = 0.1}.validate()), InvalidArgument);
  EXPECT_THROW(grid_loci(19, 40, {}), InvalidArgument);
}

TEST(ExtractDescriptor, ConstantPatchIsZero) {
  const auto d = extract_descriptor(Frame(40, 40, 0.37F), {5, 7});
  ASSERT_EQ(d.size(), 128U);
  for (float v : d) EXPECT_EQ(v, 0.0F);
}

TEST(ExtractDescriptor, OutOfBoundsLocusThrows) {
  EXPECT_THROW(extract_descriptor(Frame(40, 40, 0.5F), {21, 0}), InvalidArgument);
  EXPECT_THROW(extract_descriptor(Frame(40, 40, 0.5F), {-1, 0}), InvalidArgument);
}

TEST(ExtractDescriptor, VerticalStepEdgeUsesHorizontalGradientBins) {
  std::vector<float> luma(40 * 40);
  for (int y = 0; y < 40; ++y)
    for (int x = 0; x < 40; ++x) luma[static_cast<std::size_t>(y) * 40 + x] = x < 19 ? 0.2F : 0.8F;
  const Frame f(40, 40, luma);
  const auto d = extract_descriptor(f, {10, 10});
  double mass = 0.0;
  for (std::size_t i = 0; i < d.size(); ++i) {
    const std::size_t bin = i % 8;
    if (bin != 0 && bin != 4) EXPECT_EQ(d[i], 0.0F) << "component " << i;
    mass += d[i];
  }
  EXPECT_GT(mass, 0.0);
  const auto ref = oracle::direct_descriptor(f, 10, 10, 20, 4, 8, kDescriptorClip);
  for (std::size_t i = 0; i < d.size(); ++i) EXPECT_NEAR(d[i], ref[i], 1e-6);
}

TEST(ExtractDescriptor, MatchesDirectHistogramOnRandomPatches) {
  Rng rng(11);
  for (int trial = 0; trial < 12; ++trial) {
    const oracle::Texture tex = oracle::Texture::random(rng, 5, 4.0, 30.0);
    const Frame f = trial % 3 == 0 ? oracle::random_frame(rng, 48, 44) : tex.render(48, 44);
    const int lx = oracle::uniform_int(rng, 0, 28);
    const int ly = oracle::uniform_int(rng, 0, 24);
    const auto d = extract_descriptor(f, {lx, ly});
    const auto ref = oracle::direct_descriptor(f, lx, ly, 20, 4, 8, kDescriptorClip);
    for (std::size_t i = 0; i < d.size(); ++i) EXPECT_NEAR(d[i], ref[i], 2e-6) << "trial " << trial << " i " << i;
  }
}

TEST(ExtractDescriptor, GainInvariance) {
  Rng rng(4);
  const Frame f = oracle::Texture::random(rng).render(60, 50);
  std::vector<float> half(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) half[i] = f.luma()[i] * 0.5F;
  const Frame g(60, 50, half);
  for (const Locus l : {Locus{0, 0}, Locus{13, 9}, Locus{40, 30}}) {
    const auto a = extract_descriptor(f, l);
    const auto b = extract_descriptor(g, l);
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_NEAR(a[i], b[i], 1e-6);
  }
}

TEST(ExtractGrid, SinglePatchFrameHasOneDescriptor) {
  Rng rng(1);
  const auto g = extract_grid(oracle::random_frame(rng, 20, 20));
  EXPECT_EQ(g.size(), 1U);
  EXPECT_EQ(g.data.size(), 128U);
}

TEST(ExtractGrid, HundredBySixtyHas861Descriptors) {
  Rng rng(1);
  const auto g = extract_grid(oracle::random_frame(rng, 100, 60));
  EXPECT_EQ(g.grid_w, 41);
  EXPECT_EQ(g.grid_h, 21);
  EXPECT_EQ(g.size(), 861U);
  EXPECT_EQ(g.data.size(), 861U * 128U);
}

TEST(ExtractGrid, AgreesWithPerLocusExtraction) {
  Rng rng(8);
  const Frame f = oracle::random_frame(rng, 30, 26);
  const auto g = extract_grid(f);
  for (std::size_t i = 0; i < g.size(); ++i) {
    const auto d = extract_descriptor(f, g.loci[i]);
    for (std::size_t c = 0; c < d.size(); ++c) ASSERT_EQ(g.descriptor(i)[c], d[c]);
  }
}

TEST(ExtractGrid, ShiftByOneStrideIsEquivariant) {
  Rng rng(21);
  for (int trial = 0; trial < 4; ++trial) {
    const Frame base = oracle::random_frame(rng, 70, 44);
    // shifted(x, y) = base(x + stride, y): content moves left by one stride.
    std::vector<float> luma(base.size());
    for (int y = 0; y < 44; ++y)
      for (int x = 0; x < 70; ++x) luma[static_cast<std::size_t>(y) * 70 + x] = base.clamped(x + 2, y);
    const Frame shifted(70, 44, luma);
    const auto a = extract_grid(base);
    const auto b = extract_grid(shifted);
    // Interior: the patch and its one-pixel gradient border stay inside both frames.
    for (int j = 1; j + 1 < a.grid_h; ++j) {
      for (int i = 1; i + 2 < a.grid_w; ++i) {
        const auto da = a.descriptor(static_cast<std::size_t>(j) * a.grid_w + i + 1);
        const auto db = b.descriptor(static_cast<std::size_t>(j) * b.grid_w + i);
        for (std::size_t c = 0; c < da.size(); ++c) ASSERT_EQ(da[c], db[c]) << i << "," << j;
      }
    }
  }
}

TEST(ExtractGrid, NormAndClipInvariants) {
  Rng rng(33);
  for (int trial = 0; trial < 5; ++trial) {
    const Frame f = trial % 2 ? oracle::random_frame(rng, 50, 40) : oracle::Texture::random(rng).render(50, 40);
    const auto g = extract_grid(f);
    for (std::size_t i = 0; i < g.size(); ++i) {
      const auto d = g.descriptor(i);
      const double n = norm(d);
      if (n == 0.0) continue;
      EXPECT_NEAR(n, 1.0, 1e-6);
      std::size_t nonzero = 0;
      for (float v : d) nonzero += v > 0.0F;
      if (nonzero * kDescriptorClip * kDescriptorClip >= 1.0) {
        for (float v : d) EXPECT_LE(v, kDescriptorClip + 1e-6);
      }
    }
  }
}

TEST(ExtractGrid, IsDeterministic) {
  Rng rng(2);
  const Frame f = oracle::random_frame(rng, 64, 48);
  const auto a = extract_grid(f);
  const auto b = extract_grid(f);
  EXPECT_EQ(a.data, b.data);
}

TEST(DescriptorGridFile, RoundTrip) {
  TempDir dir("dgrd");
  Rng rng(6);
  const auto g = extract_grid(oracle::random_frame(rng, 44, 30));
  save_descriptor_grid(dir.path() / "g.dgrd", g);
  const auto back = load_descriptor_grid(dir.path() / "g.dgrd");
  EXPECT_EQ(back.grid_w, g.grid_w);
  EXPECT_EQ(back.grid_h, g.grid_h);
  EXPECT_EQ(back.dim, g.dim);
  EXPECT_EQ(back.patch_size, 20);
  EXPECT_EQ(back.stride, 2);
  EXPECT_EQ(back.loci.size(), g.loci.size());
  EXPECT_EQ(back.data, g.data);
}

TEST(DescriptorGridFile, BadMagicIsFormatError) {
  TempDir dir("dgrd_bad");
  std::ofstream(dir.path() / "x.dgrd") << "XXXXjunkjunk";
  EXPECT_THROW(load_descriptor_grid(dir.path() / "x.dgrd"), FormatError);
}

}  // namespace
}  // namespace dtt
