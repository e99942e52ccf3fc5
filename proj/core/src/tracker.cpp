#include "dtt/tracker.hpp"

#include <fstream>
#include <limits>

#include "dtt/error.hpp"

namespace dtt {

void score_track(Track& track, const TransitionTable& table) {
  double sum = 0.0;
  for (std::size_t n = 0; n + 1 < track.steps.size(); ++n) {
    sum += table.log_prob(track.steps[n].word, track.steps[n + 1].word);
  }
  track.log_likelihood = sum;
  track.mean_log = track.steps.size() > 1 ? sum / static_cast<double>(track.steps.size() - 1) : 0.0;
}

std::vector<Track> infer_tracks(std::span<const WordGrid> grids, const TransitionTable& table) {
  if (grids.empty()) throw InvalidArgument("infer_tracks needs at least one frame");
  const int gw = grids.front().grid_w;
  const int gh = grids.front().grid_h;
  if (gw <= 0 || gh <= 0) throw InvalidArgument("empty word grid");
  for (const auto& g : grids) {
    if (g.grid_w != gw || g.grid_h != gh || g.words.size() != static_cast<std::size_t>(gw) * gh) {
      throw DimensionMismatch("word grids differ in size");
    }
    for (auto w : g.words) {
      if (w < 0 || w >= table.k()) throw InvalidArgument("word index outside the table vocabulary");
    }
  }
  const std::size_t frames = grids.size();
  const std::size_t cells = static_cast<std::size_t>(gw) * gh;
  const auto k = static_cast<std::size_t>(table.k());
  const auto logp = table.log_probs();

  // value[n][c]: best log-likelihood of a path from cell c of frame n to the end.
  std::vector<double> value(cells, 0.0);
  std::vector<double> next_value(cells, 0.0);
  std::vector<std::int32_t> successor(frames > 1 ? (frames - 1) * cells : 0, -1);
  for (std::size_t n = frames - 1; n-- > 0;) {
    const auto& here = grids[n].words;
    const auto& there = grids[n + 1].words;
    next_value.swap(value);  // next_value now holds frame n+1
    for (int y = 0; y < gh; ++y) {
      for (int x = 0; x < gw; ++x) {
        const std::size_t c = static_cast<std::size_t>(y) * gw + x;
        const double* row = logp.data() + static_cast<std::size_t>(here[c]) * k;
        double best = -std::numeric_limits<double>::infinity();
        std::int32_t arg = -1;
        for (int dy = -1; dy <= 1; ++dy) {
          const int ny = y + dy;
          if (ny < 0 || ny >= gh) continue;
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx;
            if (nx < 0 || nx >= gw) continue;
            const std::size_t q = static_cast<std::size_t>(ny) * gw + nx;
            const double cand = row[static_cast<std::size_t>(there[q])] + next_value[q];
            if (cand > best) {
              best = cand;
              arg = static_cast<std::int32_t>(q);
            }
          }
        }
        value[c] = best;
        successor[n * cells + c] = arg;
      }
    }
  }

  std::vector<Track> tracks(cells);
  for (std::size_t start = 0; start < cells; ++start) {
    Track& t = tracks[start];
    t.steps.reserve(frames);
    std::size_t c = start;
    for (std::size_t n = 0; n < frames; ++n) {
      t.steps.push_back({grids[n].words[c], static_cast<int>(c % gw), static_cast<int>(c / gw)});
      if (n + 1 < frames) c = static_cast<std::size_t>(successor[n * cells + c]);
    }
    score_track(t, table);
  }
  return tracks;
}

void export_tracks_csv(const std::filesystem::path& path, std::span<const Track> tracks) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path.string());
  out << "track,frame,x,y,word\n";
  for (std::size_t t = 0; t < tracks.size(); ++t) {
    for (std::size_t n = 0; n < tracks[t].steps.size(); ++n) {
      const auto& s = tracks[t].steps[n];
      out << t << ',' << n << ',' << s.x << ',' << s.y << ',' << s.word << '\n';
    }
  }
}

}  // namespace dtt
