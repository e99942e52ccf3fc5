#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "dtt/codebook.hpp"
#include "dtt/segcut.hpp"
#include "dtt/tracker.hpp"
#include "dtt/transition_table.hpp"

namespace dtt {

// A known object: its transition table plus the codebook it was learnt with.
struct GalleryModel {
  std::string object_id;
  TransitionTable table;
  int codebook_k = 0;
  std::uint64_t codebook_fingerprint = 0;
  std::uint32_t frame_count = 0;
  std::string training_date;
  // Word grids of the training sequence; needed only for symmetric scoring.
  std::vector<WordGrid> words;
};

inline constexpr double kEmptyForegroundPenalty = 0.5;

struct ScoreOptions {
  GraphOptions graph;
  double empty_foreground_penalty = kEmptyForegroundPenalty;
};

struct ScoreDetail {
  double similarity = 0.0;
  std::vector<Track> tracks;
  TrackGraph graph;  // labelled
  double energy = 0.0;
  std::size_t foreground = 0;
};

// Tracks the query through the model's table, segments the tracks and returns
// exp(mean of mean_log over foreground tracks). With no foreground track the
// mean runs over all tracks and the result is multiplied by the penalty.
ScoreDetail score_detailed(std::span<const WordGrid> query, const TransitionTable& table,
                           const ScoreOptions& options = {});
double score(std::span<const WordGrid> query, const GalleryModel& model,
             const ScoreOptions& options = {});

struct MatchResult {
  std::vector<std::string> ranking;   // gallery ids, best first
  std::vector<double> similarities;   // aligned with ranking
  std::optional<double> separation;   // best / second best, when >= 2 galleries

  bool top_is(const std::string& id) const { return !ranking.empty() && ranking.front() == id; }
};

struct GalleryScore {
  std::string id;
  double similarity = 0.0;
};

// Sorts by descending similarity, ties by ascending id.
MatchResult rank(std::vector<GalleryScore> scores);
MatchResult rank(std::span<const WordGrid> query, std::span<const GalleryModel> models,
                 const ScoreOptions& options = {});

// Model file: a DTT1 table block followed by a "META" block (u16 version,
// object id, u32 codebook k, u64 codebook fingerprint, u32 frame count,
// training date) and a "WGRS" block with the training word grids (u32 frames,
// u32 grid_w, grid_h, patch, stride, then u16 words).
void save_model(const std::filesystem::path& path, const GalleryModel& model);
GalleryModel load_model(const std::filesystem::path& path);

}  // namespace dtt
