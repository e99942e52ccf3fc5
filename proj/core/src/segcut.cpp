#include "dtt/segcut.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <unordered_map>

#include "dtt/error.hpp"
#include "dtt/maxflow.hpp"

namespace dtt {

double TrackGraph::energy(std::span<const Label> labeling) const {
  if (labeling.size() != size()) throw InvalidArgument("labeling size differs from graph");
  double e = 0.0;
  for (std::size_t i = 0; i < size(); ++i) {
    e += labeling[i] == Label::foreground ? cost_fg[i] : cost_bg[i];
  }
  for (const auto& edge : edges) {
    if (labeling[edge.i] != labeling[edge.j]) e += edge.weight;
  }
  return e;
}

std::size_t TrackGraph::foreground_count() const {
  return static_cast<std::size_t>(std::count(labels.begin(), labels.end(), Label::foreground));
}

TrackGraph build_graph(std::span<const Track> tracks, const GraphOptions& options) {
  if (tracks.empty()) throw InvalidArgument("build_graph needs at least one track");
  const std::size_t frames = tracks.front().size();
  for (const auto& t : tracks) {
    if (t.size() != frames) throw InvalidArgument("tracks differ in length");
  }
  if (frames == 0) throw InvalidArgument("tracks are empty");
  TrackGraph g;
  g.cost_bg.resize(tracks.size());
  g.cost_fg.resize(tracks.size());
  for (std::size_t i = 0; i < tracks.size(); ++i) {
    const double p = std::clamp(std::exp(tracks[i].mean_log), 0.0, 1.0);
    g.cost_bg[i] = p;
    g.cost_fg[i] = 1.0 - p;
  }

  const double lambda = 1.0 / static_cast<double>(frames);
  const int reach = static_cast<int>(std::ceil(std::sqrt(options.neighbour_dist_sq)));
  // Accumulated weight per unordered pair, keyed (i, j) with i < j.
  std::map<std::pair<std::size_t, std::size_t>, double> weights;
  std::unordered_map<std::int64_t, std::vector<std::size_t>> buckets;
  auto key = [](int x, int y) { return (static_cast<std::int64_t>(y) << 32) ^ static_cast<std::uint32_t>(x); };
  for (std::size_t n = 0; n < frames; ++n) {
    buckets.clear();
    for (std::size_t i = 0; i < tracks.size(); ++i) {
      buckets[key(tracks[i].steps[n].x, tracks[i].steps[n].y)].push_back(i);
    }
    for (std::size_t i = 0; i < tracks.size(); ++i) {
      const int xi = tracks[i].steps[n].x;
      const int yi = tracks[i].steps[n].y;
      for (int dy = -reach; dy <= reach; ++dy) {
        for (int dx = -reach; dx <= reach; ++dx) {
          const double d2 = static_cast<double>(dx) * dx + static_cast<double>(dy) * dy;
          if (d2 >= options.neighbour_dist_sq) continue;
          const auto it = buckets.find(key(xi + dx, yi + dy));
          if (it == buckets.end()) continue;
          for (std::size_t j : it->second) {
            if (j <= i) continue;
            const double add = d2 == 0.0 ? options.must_link : 1.0 / d2;
            weights[{i, j}] += lambda * add;
          }
        }
      }
    }
  }
  g.edges.reserve(weights.size());
  for (const auto& [ij, w] : weights) g.edges.push_back({ij.first, ij.second, w});
  return g;
}

TrackGraph segment(TrackGraph graph) {
  const std::size_t n = graph.size();
  MaxFlow flow(n);
  for (std::size_t i = 0; i < n; ++i) {
    // Source side = foreground: cutting source->i (i labelled background)
    // pays cost_bg, cutting i->sink pays cost_fg. The shared minimum is a
    // constant offset and is dropped.
    const double base = std::min(graph.cost_bg[i], graph.cost_fg[i]);
    flow.set_terminal(i, graph.cost_bg[i] - base, graph.cost_fg[i] - base);
  }
  for (const auto& e : graph.edges) {
    if (e.i >= n || e.j >= n || e.i == e.j) throw InvalidArgument("malformed graph edge");
    flow.add_edge(e.i, e.j, e.weight, e.weight);
  }
  flow.solve();
  graph.labels.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    graph.labels[i] = flow.on_source_side(i) ? Label::foreground : Label::background;
  }
  return graph;
}

std::vector<Mask> rasterize_foreground(std::span<const Track> tracks, std::span<const Label> labels,
                                       int frame_w, int frame_h, const GridConfig& cfg) {
  if (labels.size() != tracks.size()) throw InvalidArgument("one label per track required");
  const std::size_t frames = tracks.empty() ? 0 : tracks.front().size();
  std::vector<Mask> masks(frames, Mask(frame_w, frame_h));
  const int step = cfg.stride();
  const int s = cfg.patch_size;
  for (std::size_t t = 0; t < tracks.size(); ++t) {
    if (labels[t] != Label::foreground) continue;
    for (std::size_t n = 0; n < frames; ++n) {
      const int x0 = tracks[t].steps[n].x * step;
      const int y0 = tracks[t].steps[n].y * step;
      for (int y = std::max(0, y0); y < std::min(frame_h, y0 + s); ++y) {
        for (int x = std::max(0, x0); x < std::min(frame_w, x0 + s); ++x) masks[n].set(x, y, true);
      }
    }
  }
  return masks;
}

}  // namespace dtt
