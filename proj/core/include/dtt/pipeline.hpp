#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "dtt/codebook.hpp"
#include "dtt/densegrid.hpp"
#include "dtt/matcher.hpp"
#include "dtt/scalenorm.hpp"
#include "dtt/transition_table.hpp"

namespace dtt {

// Knobs shared by every end-to-end entry point (CLI, evaluation, tests).
struct PipelineConfig {
  GridConfig grid;
  int k = kDefaultVocabularySize;
  std::uint64_t seed = 1;
  double succession_threshold = kDefaultSuccessionThreshold;
  double alpha = 0.0;  // <= 0 selects 1/k
  bool scale_norm = true;
  bool symmetric = false;
  FlowOptions flow;
  ScaleOptions scale;
  ScoreOptions scoring;
  KMeansOptions kmeans{.max_iterations = 100, .tolerance = 1e-4, .max_samples = 60000};
  std::string training_date;  // stored in model metadata, empty by default

  double effective_alpha() const { return alpha > 0.0 ? alpha : default_alpha(k); }
};

// A sequence after scale normalisation and dense extraction.
struct PreparedSequence {
  std::string id;
  NormalizedSequence normalized;
  std::vector<DescriptorGrid> descriptors;
};

PreparedSequence prepare_sequence(const VideoSequence& seq, const PipelineConfig& cfg);

// Pools every non-zero descriptor of the given sequences and runs k-means.
Codebook train_global_codebook(std::span<const PreparedSequence* const> sequences, const PipelineConfig& cfg,
                               KMeansTrace* trace = nullptr);

std::vector<WordGrid> quantize_sequence(const PreparedSequence& seq, const Codebook& cb);

// Learns a gallery model from one prepared sequence. Possibly successive
// pairs are found on the normalised frames and transitions are restricted to
// the coarse foreground masks.
GalleryModel train_model(const std::string& object_id, const PreparedSequence& seq,
                         std::vector<WordGrid> words, const Codebook& cb, const PipelineConfig& cfg);

// Query-against-gallery similarity. In symmetric mode `query_model` must hold
// the query's own table and the result averages both scoring directions.
double score_pair(const GalleryModel& query_model, const GalleryModel& gallery, const PipelineConfig& cfg);

// Runs fn(i) for i in [0, n) on a small worker pool. Results must be written
// to per-index slots so that the outcome does not depend on scheduling.
void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, unsigned threads = 0);

}  // namespace dtt
