#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <span>
#include <utility>
#include <vector>

#include "dtt/codebook.hpp"
#include "dtt/image.hpp"

namespace dtt {

inline constexpr double kDefaultSuccessionThreshold = 0.1;

// Ordered frame-index pair (from, to).
struct FramePair {
  std::size_t from = 0;
  std::size_t to = 0;
  friend bool operator==(const FramePair&, const FramePair&) = default;
  friend auto operator<=>(const FramePair&, const FramePair&) = default;
};

// Descriptor transition table: row j holds p(w_j -> w_i) for a small viewpoint
// change, estimated from counts with additive smoothing.
class TransitionTable {
 public:
  TransitionTable() = default;
  // Throws InvalidArgument unless counts.size() == k*k and alpha > 0.
  TransitionTable(int k, std::vector<std::uint32_t> counts, double alpha);
  // Uniform table (no observations).
  static TransitionTable uniform(int k, double alpha);

  int k() const noexcept { return k_; }
  double alpha() const noexcept { return alpha_; }
  std::uint32_t count(int from, int to) const { return counts_[index(from, to)]; }
  double prob(int from, int to) const { return probs_[index(from, to)]; }
  double log_prob(int from, int to) const { return log_probs_[index(from, to)]; }
  std::span<const std::uint32_t> counts() const noexcept { return counts_; }
  std::span<const double> log_probs() const noexcept { return log_probs_; }
  std::uint64_t row_total(int from) const { return row_totals_[static_cast<std::size_t>(from)]; }

  friend bool operator==(const TransitionTable& a, const TransitionTable& b) {
    return a.k_ == b.k_ && a.alpha_ == b.alpha_ && a.counts_ == b.counts_;
  }

  void write(std::ostream& out) const;
  static TransitionTable read(std::istream& in);

 private:
  std::size_t index(int from, int to) const {
    return static_cast<std::size_t>(from) * static_cast<std::size_t>(k_) + static_cast<std::size_t>(to);
  }
  void fill();

  int k_ = 0;
  double alpha_ = 0.0;
  std::vector<std::uint32_t> counts_;
  std::vector<std::uint64_t> row_totals_;
  std::vector<double> probs_;
  std::vector<double> log_probs_;
};

// All ordered pairs (i, j), i != j, with frame_distance(frames[i], frames[j]) <= t.
std::vector<FramePair> possibly_successive_pairs(std::span<const Frame> frames, double t);

// Counts word transitions at identical grid loci for every pair. A locus
// contributes only when its patch centre lies inside the coarse mask of both
// frames; an empty mask span means "everything is foreground".
TransitionTable learn_dtt(std::span<const WordGrid> grids, std::span<const Mask> masks,
                          std::span<const FramePair> pairs, int k, double alpha);

inline double default_alpha(int k) { return 1.0 / k; }

void save_transition_table(const std::filesystem::path& path, const TransitionTable& table);
TransitionTable load_transition_table(const std::filesystem::path& path);

}  // namespace dtt
