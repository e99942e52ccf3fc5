#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "dtt/codebook.hpp"
#include "dtt/transition_table.hpp"

namespace dtt {

// One (word, grid x, grid y) triple per frame.
struct TrackStep {
  std::int32_t word = 0;
  int x = 0;
  int y = 0;
  friend bool operator==(const TrackStep&, const TrackStep&) = default;
};

struct Track {
  std::vector<TrackStep> steps;
  double log_likelihood = 0.0;  // sum of log T(w_n, w_n+1)
  double mean_log = 0.0;        // log_likelihood / (N - 1), 0 for a single step

  std::size_t size() const { return steps.size(); }
};

// Maximum-likelihood word track from every first-frame locus. Each step may
// move to any cell of the 3x3 grid neighbourhood (|dx|, |dy| <= 1). One
// backward dynamic-programming pass serves all start loci; ties go to the
// successor with the smallest (y, x).
std::vector<Track> infer_tracks(std::span<const WordGrid> grids, const TransitionTable& table);

// Recomputes log_likelihood and mean_log of a track from its words.
void score_track(Track& track, const TransitionTable& table);

// CSV with columns track,frame,x,y,word.
void export_tracks_csv(const std::filesystem::path& path, std::span<const Track> tracks);

}  // namespace dtt
