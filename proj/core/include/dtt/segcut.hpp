#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "dtt/densegrid.hpp"
#include "dtt/image.hpp"
#include "dtt/tracker.hpp"

namespace dtt {

enum class Label : std::uint8_t { background = 0, foreground = 1 };

struct GraphEdge {
  std::size_t i = 0;
  std::size_t j = 0;
  double weight = 0.0;
};

// Tracks as nodes, with unary label costs and pairwise disagreement costs.
struct TrackGraph {
  std::vector<double> cost_bg;
  std::vector<double> cost_fg;
  std::vector<GraphEdge> edges;  // i < j, no duplicates
  std::vector<Label> labels;     // filled by segment()

  std::size_t size() const { return cost_bg.size(); }
  // Unary costs of the chosen labels plus every edge whose ends disagree.
  double energy(std::span<const Label> labeling) const;
  double energy() const { return energy(labels); }
  std::size_t foreground_count() const;
};

struct GraphOptions {
  double neighbour_dist_sq = 4.0;   // tracks connect when closer than this (grid units^2)
  double must_link = 1e9;           // weight per coincident frame, before scaling
};

// Background cost exp(mean_log) (the per-transition geometric-mean chain
// probability), foreground cost its complement. Tracks i, j are connected
// when some frame puts them closer than 2 grid units; the weight is
// (1/frames) * sum over frames of 1/d^2 for 0 < d^2 < 4, plus a must-link
// term for every frame in which they coincide.
TrackGraph build_graph(std::span<const Track> tracks, const GraphOptions& options = {});

// Exact minimum-energy labeling by s-t minimum cut.
TrackGraph segment(TrackGraph graph);

// Per frame, the union of patch footprints of all foreground tracks.
std::vector<Mask> rasterize_foreground(std::span<const Track> tracks, std::span<const Label> labels,
                                       int frame_w, int frame_h, const GridConfig& cfg);

}  // namespace dtt
