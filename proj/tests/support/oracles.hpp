#pragma once

// Brute-force reference implementations used as test oracles, plus random
// instance generators. Everything here is written for clarity over speed and
// shares no code with the library beyond its data types.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "dtt/baselines.hpp"
#include "dtt/codebook.hpp"
#include "dtt/image.hpp"
#include "dtt/segcut.hpp"
#include "dtt/tracker.hpp"
#include "dtt/transition_table.hpp"

namespace dtt::oracle {

using Rng = std::mt19937_64;

inline double uniform(Rng& rng, double lo, double hi) {
  return std::uniform_real_distribution<double>(lo, hi)(rng);
}

inline int uniform_int(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

// ---------------------------------------------------------------------------
// Frames

inline Frame random_frame(Rng& rng, int w, int h, double lo = 0.05, double hi = 0.95) {
  std::vector<float> luma(static_cast<std::size_t>(w) * h);
  for (float& v : luma) v = static_cast<float>(uniform(rng, lo, hi));
  return Frame(w, h, std::move(luma));
}

// Smooth band-limited texture; sampling it at shifted coordinates gives exact
// sub-image shifts.
struct Texture {
  struct Wave {
    double fx, fy, phase, amp;
  };
  std::vector<Wave> waves;
  double base = 0.5;

  static Texture random(Rng& rng, int n = 6, double min_period = 6.0, double max_period = 24.0) {
    Texture t;
    for (int i = 0; i < n; ++i) {
      const double period = uniform(rng, min_period, max_period);
      const double angle = uniform(rng, 0.0, 2.0 * std::numbers::pi);
      t.waves.push_back({std::cos(angle) / period, std::sin(angle) / period, uniform(rng, 0.0, 6.3),
                         uniform(rng, 0.03, 0.07)});
    }
    return t;
  }
  double operator()(double x, double y) const {
    double v = base;
    for (const auto& w : waves) v += w.amp * std::sin(2.0 * std::numbers::pi * (w.fx * x + w.fy * y) + w.phase);
    return std::clamp(v, 0.0, 1.0);
  }
  Frame render(int w, int h, double dx = 0.0, double dy = 0.0) const {
    std::vector<float> luma(static_cast<std::size_t>(w) * h);
    for (int y = 0; y < h; ++y)
      for (int x = 0; x < w; ++x) luma[static_cast<std::size_t>(y) * w + x] = static_cast<float>((*this)(x - dx, y - dy));
    return Frame(w, h, std::move(luma));
  }
};

// A textured disk of `radius` centred in the frame, displaced by (disk_dx, 0),
// over a second texture displaced by (bg_dx, 0).
inline Frame disk_frame(const Texture& fg, const Texture& bg, int w, int h, double radius, double disk_dx,
                        double bg_dx) {
  std::vector<float> luma(static_cast<std::size_t>(w) * h);
  const double cx = (w - 1) / 2.0 + disk_dx;
  const double cy = (h - 1) / 2.0;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const double r = std::hypot(x - cx, y - cy);
      const double v = r <= radius ? fg(x - disk_dx, y) : bg(x - bg_dx, y);
      luma[static_cast<std::size_t>(y) * w + x] = static_cast<float>(v);
    }
  }
  return Frame(w, h, std::move(luma));
}

inline double direct_frame_distance(const Frame& a, const Frame& b) {
  double num = 0.0;
  double den = 0.0;
  for (int y = 0; y < a.height(); ++y) {
    for (int x = 0; x < a.width(); ++x) {
      const double d = static_cast<double>(a.at(x, y)) - b.at(x, y);
      num += d * d;
      den += static_cast<double>(a.at(x, y)) * a.at(x, y);
    }
  }
  if (den == 0.0) return num == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
  return std::sqrt(num) / std::sqrt(den);
}

// ---------------------------------------------------------------------------
// Descriptor: direct per-pixel gradient histogram.

inline std::vector<double> direct_descriptor(const Frame& frame, int lx, int ly, int s, int cells, int bins,
                                             double clip) {
  auto px = [&](int x, int y) {
    x = std::clamp(x, 0, frame.width() - 1);
    y = std::clamp(y, 0, frame.height() - 1);
    return static_cast<double>(frame.at(x, y));
  };
  const double cell = static_cast<double>(s) / cells;
  std::vector<double> h(static_cast<std::size_t>(cells) * cells * bins, 0.0);
  for (int y = 0; y < s; ++y) {
    for (int x = 0; x < s; ++x) {
      const int fx = lx + x;
      const int fy = ly + y;
      const double gx = (px(fx + 1, fy) - px(fx - 1, fy)) / 2.0;
      const double gy = (px(fx, fy + 1) - px(fx, fy - 1)) / 2.0;
      const double mag = std::hypot(gx, gy);
      if (mag == 0.0) continue;
      double ang = std::atan2(gy, gx);
      if (ang < 0) ang += 2.0 * std::numbers::pi;
      const double ob = ang / (2.0 * std::numbers::pi) * bins;
      const double rx = x + 0.5 - s / 2.0;
      const double ry = y + 0.5 - s / 2.0;
      const double gauss = std::exp(-(rx * rx + ry * ry) / (2.0 * (s / 2.0) * (s / 2.0)));
      // Cell centres sit at (i + 0.5) * cell; weights fall off linearly.
      for (int cy = 0; cy < cells; ++cy) {
        for (int cx = 0; cx < cells; ++cx) {
          const double wx = 1.0 - std::abs((x + 0.5) - (cx + 0.5) * cell) / cell;
          const double wy = 1.0 - std::abs((y + 0.5) - (cy + 0.5) * cell) / cell;
          if (wx <= 0.0 || wy <= 0.0) continue;
          for (int b = 0; b < bins; ++b) {
            double d = std::abs(ob - b);
            d = std::min(d, bins - d);
            const double wo = 1.0 - d;
            if (wo <= 0.0) continue;
            h[(static_cast<std::size_t>(cy) * cells + cx) * bins + b] += mag * gauss * wx * wy * wo;
          }
        }
      }
    }
  }
  // Normalise, then clip and renormalise until no component exceeds the clip.
  auto normalize = [&] {
    double n = 0.0;
    for (double v : h) n += v * v;
    n = std::sqrt(n);
    if (n > 0) for (double& v : h) v /= n;
    return n;
  };
  if (normalize() == 0.0) return h;
  std::size_t nonzero = 0;
  for (double v : h) nonzero += v > 0.0;
  if (static_cast<double>(nonzero) * clip * clip < 1.0) {
    for (double& v : h) v = std::min(v, clip);
    normalize();
    return h;
  }
  for (int it = 0; it < 10000; ++it) {
    bool over = false;
    for (double& v : h) {
      if (v > clip) {
        v = clip;
        over = true;
      }
    }
    normalize();
    if (!over) break;
  }
  return h;
}

// ---------------------------------------------------------------------------
// Codebook

inline std::int32_t scan_nearest(std::span<const float> v, const Codebook& cb) {
  std::int32_t best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int j = 0; j < cb.k; ++j) {
    double d = 0.0;
    for (int i = 0; i < cb.dim; ++i) {
      const double diff = static_cast<double>(v[static_cast<std::size_t>(i)]) - cb.centroid(j)[static_cast<std::size_t>(i)];
      d += diff * diff;
    }
    if (d < best_d) {
      best_d = d;
      best = j;
    }
  }
  return best;
}

// ---------------------------------------------------------------------------
// Word grids and tables

inline WordGrid random_word_grid(Rng& rng, int w, int h, int k, int patch = 20, int stride = 2) {
  WordGrid g;
  g.grid_w = w;
  g.grid_h = h;
  g.k = k;
  g.patch_size = patch;
  g.stride = stride;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      g.words.push_back(uniform_int(rng, 0, k - 1));
      g.loci.push_back({x * stride, y * stride});
    }
  }
  return g;
}

inline WordGrid word_grid(int w, int h, int k, std::vector<std::int32_t> words, int patch = 20, int stride = 2) {
  WordGrid g;
  g.grid_w = w;
  g.grid_h = h;
  g.k = k;
  g.patch_size = patch;
  g.stride = stride;
  g.words = std::move(words);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) g.loci.push_back({x * stride, y * stride});
  return g;
}

inline TransitionTable random_table(Rng& rng, int k, int max_count = 6) {
  std::vector<std::uint32_t> counts(static_cast<std::size_t>(k) * k);
  for (auto& c : counts) c = static_cast<std::uint32_t>(uniform_int(rng, 0, max_count));
  return TransitionTable(k, std::move(counts), uniform(rng, 0.05, 1.0));
}

// Direct pair enumeration of transition counts.
inline std::vector<std::uint64_t> direct_counts(std::span<const WordGrid> grids, std::span<const Mask> masks,
                                                std::span<const FramePair> pairs, int k) {
  std::vector<std::uint64_t> counts(static_cast<std::size_t>(k) * k, 0);
  for (const auto& p : pairs) {
    for (int y = 0; y < grids[p.from].grid_h; ++y) {
      for (int x = 0; x < grids[p.from].grid_w; ++x) {
        const std::size_t c = static_cast<std::size_t>(y) * grids[p.from].grid_w + x;
        if (!masks.empty()) {
          const int half = grids[p.from].patch_size / 2;
          const int mx = grids[p.from].loci[c].x + half;
          const int my = grids[p.from].loci[c].y + half;
          if (!masks[p.from].at(mx, my) || !masks[p.to].at(mx, my)) continue;
        }
        ++counts[static_cast<std::size_t>(grids[p.from].words[c]) * k + grids[p.to].words[c]];
      }
    }
  }
  return counts;
}

// ---------------------------------------------------------------------------
// Tracks: exhaustive enumeration of every bound-velocity path.
//
// Path scores are accumulated from the last transition backwards, the natural
// order for comparing suffixes, so that exactly tied paths compare equal. Among
// tied optima the path whose successors are lexicographically smallest in
// (y, x), step by step, wins.

inline std::vector<Track> exhaustive_tracks(std::span<const WordGrid> grids, const TransitionTable& table) {
  const int gw = grids.front().grid_w;
  const int gh = grids.front().grid_h;
  const std::size_t frames = grids.size();
  std::vector<Track> out;
  for (int sy = 0; sy < gh; ++sy) {
    for (int sx = 0; sx < gw; ++sx) {
      std::vector<std::pair<int, int>> path{{sx, sy}};
      std::vector<std::pair<int, int>> best_path;
      double best = -std::numeric_limits<double>::infinity();
      auto word = [&](std::size_t n, int x, int y) { return grids[n].at(x, y); };
      auto total = [&](const std::vector<std::pair<int, int>>& p) {
        double s = 0.0;
        for (std::size_t n = p.size() - 1; n-- > 0;) {
          s = table.log_prob(word(n, p[n].first, p[n].second), word(n + 1, p[n + 1].first, p[n + 1].second)) + s;
        }
        return s;
      };
      auto lex_less = [](const std::vector<std::pair<int, int>>& a, const std::vector<std::pair<int, int>>& b) {
        for (std::size_t i = 0; i < a.size(); ++i) {
          if (a[i].second != b[i].second) return a[i].second < b[i].second;
          if (a[i].first != b[i].first) return a[i].first < b[i].first;
        }
        return false;
      };
      auto recurse = [&](auto&& self) -> void {
        if (path.size() == frames) {
          const double s = total(path);
          if (s > best || (s == best && lex_less(path, best_path))) {
            best = s;
            best_path = path;
          }
          return;
        }
        const auto [x, y] = path.back();
        for (int dy = -1; dy <= 1; ++dy) {
          for (int dx = -1; dx <= 1; ++dx) {
            const int nx = x + dx;
            const int ny = y + dy;
            if (nx < 0 || ny < 0 || nx >= gw || ny >= gh) continue;
            path.emplace_back(nx, ny);
            self(self);
            path.pop_back();
          }
        }
      };
      recurse(recurse);
      Track t;
      for (std::size_t n = 0; n < frames; ++n) {
        t.steps.push_back({word(n, best_path[n].first, best_path[n].second), best_path[n].first, best_path[n].second});
      }
      double fwd = 0.0;
      for (std::size_t n = 0; n + 1 < frames; ++n) fwd += table.log_prob(t.steps[n].word, t.steps[n + 1].word);
      t.log_likelihood = fwd;
      t.mean_log = frames > 1 ? fwd / static_cast<double>(frames - 1) : 0.0;
      out.push_back(std::move(t));
    }
  }
  return out;
}

// ---------------------------------------------------------------------------
// Graphs

inline TrackGraph random_graph(Rng& rng, std::size_t n, double edge_probability = 0.35) {
  TrackGraph g;
  for (std::size_t i = 0; i < n; ++i) {
    const double p = uniform(rng, 0.0, 1.0);
    g.cost_bg.push_back(p);
    g.cost_fg.push_back(1.0 - p);
  }
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (uniform(rng, 0.0, 1.0) < edge_probability) g.edges.push_back({i, j, uniform(rng, 0.01, 0.8)});
    }
  }
  return g;
}

inline double exhaustive_min_energy(const TrackGraph& g) {
  const std::size_t n = g.size();
  double best = std::numeric_limits<double>::infinity();
  std::vector<Label> labels(n);
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << n); ++mask) {
    for (std::size_t i = 0; i < n; ++i) labels[i] = (mask >> i) & 1U ? Label::foreground : Label::background;
    double e = 0.0;
    for (std::size_t i = 0; i < n; ++i) e += labels[i] == Label::foreground ? g.cost_fg[i] : g.cost_bg[i];
    for (const auto& edge : g.edges) {
      if (labels[edge.i] != labels[edge.j]) e += edge.weight;
    }
    best = std::min(best, e);
  }
  return best;
}

// Direct evaluation of the edge rule for one track pair.
inline double direct_edge_weight(const Track& a, const Track& b, double must_link = 1e9) {
  const double lambda = 1.0 / static_cast<double>(a.size());
  double w = 0.0;
  for (std::size_t n = 0; n < a.size(); ++n) {
    const double dx = a.steps[n].x - b.steps[n].x;
    const double dy = a.steps[n].y - b.steps[n].y;
    const double d2 = dx * dx + dy * dy;
    if (d2 == 0.0) {
      w += lambda * must_link;
    } else if (d2 < 4.0) {
      w += lambda / d2;
    }
  }
  return w;
}

// ---------------------------------------------------------------------------
// Baselines

inline double scan_maxmax(const FeatureSet& a, const FeatureSet& b) {
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < a.size(); ++i) {
    for (std::size_t j = 0; j < b.size(); ++j) {
      double dot = 0.0, na = 0.0, nb = 0.0;
      for (int d = 0; d < a.dim(); ++d) {
        const double x = a.vector(i)[static_cast<std::size_t>(d)];
        const double y = b.vector(j)[static_cast<std::size_t>(d)];
        dot += x * y;
        na += x * x;
        nb += y * y;
      }
      best = std::max(best, dot / std::sqrt(na) / std::sqrt(nb));
    }
  }
  return best;
}

inline FeatureSet random_feature_set(Rng& rng, std::size_t n, int dim) {
  std::vector<float> data(n * static_cast<std::size_t>(dim));
  for (float& v : data) v = static_cast<float>(uniform(rng, -1.0, 1.0));
  return FeatureSet(FeatureSource::sift, dim, data);
}

}  // namespace dtt::oracle
