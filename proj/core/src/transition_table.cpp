#include "dtt/transition_table.hpp"

#include <cmath>
#include <fstream>
#include <limits>

#include "dtt/binary_io.hpp"
#include "dtt/error.hpp"
#include "dtt/ingest.hpp"

namespace dtt {

TransitionTable::TransitionTable(int k, std::vector<std::uint32_t> counts, double alpha)
    : k_(k), alpha_(alpha), counts_(std::move(counts)) {
  if (k < 1) throw InvalidArgument("transition table needs k >= 1");
  if (!(alpha > 0.0) || !std::isfinite(alpha)) {
    throw InvalidArgument("smoothing alpha must be positive");
  }
  if (counts_.size() != static_cast<std::size_t>(k) * k) {
    throw InvalidArgument("transition counts must be k*k");
  }
  fill();
}

TransitionTable TransitionTable::uniform(int k, double alpha) {
  return TransitionTable(k, std::vector<std::uint32_t>(static_cast<std::size_t>(k) * k, 0), alpha);
}

void TransitionTable::fill() {
  const auto kk = static_cast<std::size_t>(k_);
  row_totals_.assign(kk, 0);
  probs_.resize(kk * kk);
  log_probs_.resize(kk * kk);
  for (std::size_t j = 0; j < kk; ++j) {
    std::uint64_t total = 0;
    for (std::size_t i = 0; i < kk; ++i) total += counts_[j * kk + i];
    row_totals_[j] = total;
    const double denom = static_cast<double>(total) + static_cast<double>(k_) * alpha_;
    for (std::size_t i = 0; i < kk; ++i) {
      const double p = (static_cast<double>(counts_[j * kk + i]) + alpha_) / denom;
      probs_[j * kk + i] = p;
      log_probs_[j * kk + i] = std::log(p);
    }
  }
}

std::vector<FramePair> possibly_successive_pairs(std::span<const Frame> frames, double t) {
  if (!(t > 0.0)) throw InvalidArgument("succession threshold must be positive");
  std::vector<FramePair> pairs;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    for (std::size_t j = 0; j < frames.size(); ++j) {
      if (i != j && frame_distance(frames[i], frames[j]) <= t) pairs.push_back({i, j});
    }
  }
  return pairs;
}

TransitionTable learn_dtt(std::span<const WordGrid> grids, std::span<const Mask> masks,
                          std::span<const FramePair> pairs, int k, double alpha) {
  if (k < 1) throw InvalidArgument("transition table needs k >= 1");
  if (!masks.empty() && masks.size() != grids.size()) {
    throw InvalidArgument("need one mask per word grid");
  }
  for (const auto& g : grids) {
    if (g.grid_w != grids.front().grid_w || g.grid_h != grids.front().grid_h) {
      throw DimensionMismatch("word grids differ in size");
    }
    for (auto w : g.words) {
      if (w < 0 || w >= k) throw InvalidArgument("word index outside [0, k)");
    }
  }
  // Per grid, which loci have their patch centre in the foreground.
  std::vector<std::vector<std::uint8_t>> inside(grids.size());
  for (std::size_t f = 0; f < grids.size(); ++f) {
    const WordGrid& g = grids[f];
    inside[f].assign(g.size(), 1);
    if (masks.empty()) continue;
    const Mask& m = masks[f];
    const int half = g.patch_size / 2;
    for (std::size_t c = 0; c < g.size(); ++c) {
      const int x = g.loci[c].x + half;
      const int y = g.loci[c].y + half;
      const bool in = x >= 0 && y >= 0 && x < m.width && y < m.height && m.at(x, y);
      inside[f][c] = in ? 1 : 0;
    }
  }
  const auto kk = static_cast<std::size_t>(k);
  std::vector<std::uint32_t> counts(kk * kk, 0);
  for (const FramePair& p : pairs) {
    if (p.from >= grids.size() || p.to >= grids.size()) {
      throw InvalidArgument("frame pair references a missing frame");
    }
    const WordGrid& a = grids[p.from];
    const WordGrid& b = grids[p.to];
    for (std::size_t c = 0; c < a.size(); ++c) {
      if (!inside[p.from][c] || !inside[p.to][c]) continue;
      auto& cell = counts[static_cast<std::size_t>(a.words[c]) * kk + static_cast<std::size_t>(b.words[c])];
      if (cell == std::numeric_limits<std::uint32_t>::max()) {
        throw Error("transition count overflow");
      }
      ++cell;
    }
  }
  return TransitionTable(k, std::move(counts), alpha);
}

namespace {
constexpr char kTableMagic[5] = "DTT1";
constexpr std::uint16_t kTableVersion = 1;
}  // namespace

void TransitionTable::write(std::ostream& out) const {
  binio::put_magic(out, kTableMagic);
  binio::put<std::uint16_t>(out, kTableVersion);
  binio::put<std::uint32_t>(out, static_cast<std::uint32_t>(k_));
  binio::put<double>(out, alpha_);
  for (auto c : counts_) binio::put<std::uint32_t>(out, c);
}

TransitionTable TransitionTable::read(std::istream& in) {
  binio::expect_magic(in, kTableMagic);
  if (binio::get<std::uint16_t>(in) != kTableVersion) throw FormatError("unsupported DTT1 version");
  const auto k = binio::get<std::uint32_t>(in);
  if (k < 1 || k > 65536) throw FormatError("implausible vocabulary size");
  const auto alpha = binio::get<double>(in);
  if (!(alpha > 0.0) || !std::isfinite(alpha)) throw FormatError("bad smoothing alpha");
  std::vector<std::uint32_t> counts(static_cast<std::size_t>(k) * k);
  for (auto& c : counts) c = binio::get<std::uint32_t>(in);
  return TransitionTable(static_cast<int>(k), std::move(counts), alpha);
}

void save_transition_table(const std::filesystem::path& path, const TransitionTable& table) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  table.write(out);
  if (!out) throw Error("failed writing " + path.string());
}

TransitionTable load_transition_table(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw FormatError("cannot open " + path.string());
  return TransitionTable::read(in);
}

}  // namespace dtt
