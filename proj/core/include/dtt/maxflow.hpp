#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

namespace dtt {

// Max-flow / min-cut on a directed graph with real capacities (Dinic's
// algorithm). Nodes are 0..n-1; the source and sink are implicit terminals
// attached through set_terminal().
class MaxFlow {
 public:
  explicit MaxFlow(std::size_t nodes);

  // Capacity source -> node and node -> sink. Calling again overwrites.
  void set_terminal(std::size_t node, double source_cap, double sink_cap);
  // Edge with capacity `cap` from a to b and `rev_cap` from b to a.
  void add_edge(std::size_t a, std::size_t b, double cap, double rev_cap);

  double solve();
  // After solve(): true when the node is reachable from the source in the
  // residual graph (the minimal source set of a minimum cut).
  bool on_source_side(std::size_t node) const { return source_side_[node] != 0; }

 private:
  struct Arc {
    std::size_t to;
    std::size_t rev;
    double cap;
  };
  std::size_t add_arc(std::size_t a, std::size_t b, double cap, double rev_cap);
  bool build_levels();
  double augment(std::size_t v, double pushed);

  std::size_t source_;
  std::size_t sink_;
  std::vector<std::vector<Arc>> adj_;
  std::vector<std::size_t> source_arc_;
  std::vector<std::size_t> sink_arc_;
  std::vector<int> level_;
  std::vector<std::size_t> next_arc_;
  std::vector<std::uint8_t> source_side_;
};

}  // namespace dtt
