#include "dtt/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "dtt/error.hpp"

namespace dtt {

PreparedSequence prepare_sequence(const VideoSequence& seq, const PipelineConfig& cfg) {
  cfg.grid.validate();
  PreparedSequence out;
  out.id = seq.id();
  out.normalized = normalize_sequence(seq, cfg.scale_norm, cfg.flow, cfg.scale);
  out.descriptors.reserve(seq.size());
  for (const Frame& f : out.normalized.sequence.frames()) out.descriptors.push_back(extract_grid(f, cfg.grid));
  return out;
}

Codebook train_global_codebook(std::span<const PreparedSequence* const> sequences, const PipelineConfig& cfg,
                               KMeansTrace* trace) {
  if (sequences.empty()) throw InvalidArgument("codebook training needs at least one sequence");
  const int dim = cfg.grid.descriptor_size();
  std::vector<float> pool;
  for (const PreparedSequence* s : sequences) {
    for (const DescriptorGrid& g : s->descriptors) {
      if (g.dim != dim) throw DimensionMismatch("descriptor dimension differs from grid configuration");
      pool.insert(pool.end(), g.data.begin(), g.data.end());
    }
  }
  return train_codebook(pool, dim, cfg.k, cfg.seed, cfg.kmeans, trace);
}

std::vector<WordGrid> quantize_sequence(const PreparedSequence& seq, const Codebook& cb) {
  std::vector<WordGrid> out;
  out.reserve(seq.descriptors.size());
  for (const DescriptorGrid& g : seq.descriptors) out.push_back(quantize(g, cb));
  return out;
}

GalleryModel train_model(const std::string& object_id, const PreparedSequence& seq,
                         std::vector<WordGrid> words, const Codebook& cb, const PipelineConfig& cfg) {
  if (words.size() != seq.normalized.sequence.size()) {
    throw DimensionMismatch("word grids do not match the sequence length");
  }
  const auto pairs = possibly_successive_pairs(seq.normalized.sequence.frames(), cfg.succession_threshold);
  GalleryModel model;
  model.object_id = object_id;
  model.table = learn_dtt(words, seq.normalized.masks, pairs, cb.k, cfg.effective_alpha());
  model.codebook_k = cb.k;
  model.codebook_fingerprint = cb.fingerprint();
  model.frame_count = static_cast<std::uint32_t>(words.size());
  model.training_date = cfg.training_date;
  model.words = std::move(words);
  return model;
}

double score_pair(const GalleryModel& query_model, const GalleryModel& gallery, const PipelineConfig& cfg) {
  if (query_model.codebook_fingerprint != gallery.codebook_fingerprint) {
    throw InvalidArgument("query and gallery were quantised with different codebooks");
  }
  const double forward = score(query_model.words, gallery, cfg.scoring);
  if (!cfg.symmetric) return forward;
  const double backward = score(gallery.words, query_model, cfg.scoring);
  return 0.5 * (forward + backward);
}

void parallel_for(std::size_t n, const std::function<void(std::size_t)>& fn, unsigned threads) {
  if (threads == 0) threads = std::max(1U, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(threads);
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (failure) std::rethrow_exception(failure);
}

}  // namespace dtt
