#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "dtt/densegrid.hpp"

namespace dtt {

inline constexpr int kDefaultVocabularySize = 500;

// k visual words, one centroid per word.
struct Codebook {
  int k = 0;
  int dim = 0;
  std::uint64_t seed = 0;
  std::vector<float> centroids;  // k * dim, row-major

  std::span<const float> centroid(int word) const {
    return {centroids.data() + static_cast<std::size_t>(word) * dim, static_cast<std::size_t>(dim)};
  }
  // FNV-1a over the centroid bytes; models record it to detect codebook mixups.
  std::uint64_t fingerprint() const;
};

struct KMeansOptions {
  int max_iterations = 100;
  double tolerance = 1e-4;  // relative distortion change
  // Upper bound on the number of training vectors; a seeded uniform subsample
  // is drawn when the (non-zero) input is larger. 0 keeps everything.
  std::size_t max_samples = 0;
};

struct KMeansTrace {
  // Distortion (sum of squared distances) after each assignment step.
  std::vector<double> distortion;
  int iterations = 0;
  std::size_t samples = 0;
};

// k-means++ seeding followed by Lloyd iterations. All-zero vectors are
// dropped before training. Deterministic for a fixed seed and input order.
// Throws InvalidArgument when fewer than k distinct non-zero vectors remain.
Codebook train_codebook(std::span<const float> data, int dim, int k, std::uint64_t seed,
                        const KMeansOptions& options = {}, KMeansTrace* trace = nullptr);

// Word indices of one frame's grid.
struct WordGrid {
  int grid_w = 0;
  int grid_h = 0;
  int k = 0;
  int patch_size = 0;
  int stride = 0;
  std::vector<std::int32_t> words;
  std::vector<Locus> loci;

  std::size_t size() const { return words.size(); }
  std::int32_t at(int gx, int gy) const { return words[static_cast<std::size_t>(gy) * grid_w + gx]; }
  friend bool operator==(const WordGrid&, const WordGrid&) = default;
};

// Nearest centroid by Euclidean distance, lowest index on ties.
std::int32_t nearest_word(std::span<const float> descriptor, const Codebook& cb);

WordGrid quantize(const DescriptorGrid& grid, const Codebook& cb);

// Nearest-centroid assignment of n row-major vectors. Exact: candidate
// centroids are screened with a matrix product and the winner is confirmed
// with direct distance computation.
std::vector<std::int32_t> assign_nearest(std::span<const float> data, int dim, const Codebook& cb);

// "DTTC" v1: magic, u16 version, u32 k, u32 dim, u64 seed, k*dim f32.
void save_codebook(const std::filesystem::path& path, const Codebook& cb);
Codebook load_codebook(const std::filesystem::path& path);
void export_codebook_csv(const std::filesystem::path& path, const Codebook& cb);

}  // namespace dtt
