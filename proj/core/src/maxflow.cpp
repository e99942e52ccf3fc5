#include "dtt/maxflow.hpp"

#include <algorithm>
#include <limits>
#include <queue>

#include "dtt/error.hpp"

namespace dtt {
namespace {
constexpr double kResidualEps = 1e-12;
constexpr std::size_t kNone = static_cast<std::size_t>(-1);
}  // namespace

MaxFlow::MaxFlow(std::size_t nodes)
    : source_(nodes), sink_(nodes + 1), adj_(nodes + 2), source_arc_(nodes, kNone),
      sink_arc_(nodes, kNone) {}

std::size_t MaxFlow::add_arc(std::size_t a, std::size_t b, double cap, double rev_cap) {
  const std::size_t ia = adj_[a].size();
  const std::size_t ib = adj_[b].size() + (a == b ? 1 : 0);
  adj_[a].push_back({b, ib, cap});
  adj_[b].push_back({a, ia, rev_cap});
  return ia;
}

void MaxFlow::set_terminal(std::size_t node, double source_cap, double sink_cap) {
  if (node >= source_arc_.size()) throw InvalidArgument("terminal node out of range");
  if (source_cap < 0.0 || sink_cap < 0.0) throw InvalidArgument("negative terminal capacity");
  if (source_arc_[node] == kNone) {
    source_arc_[node] = add_arc(source_, node, source_cap, 0.0);
    sink_arc_[node] = add_arc(node, sink_, sink_cap, 0.0);
  } else {
    adj_[source_][source_arc_[node]].cap = source_cap;
    adj_[node][sink_arc_[node]].cap = sink_cap;
  }
}

void MaxFlow::add_edge(std::size_t a, std::size_t b, double cap, double rev_cap) {
  if (a >= source_arc_.size() || b >= source_arc_.size() || a == b) {
    throw InvalidArgument("edge endpoints invalid");
  }
  if (cap < 0.0 || rev_cap < 0.0) throw InvalidArgument("negative edge capacity");
  add_arc(a, b, cap, rev_cap);
}

bool MaxFlow::build_levels() {
  level_.assign(adj_.size(), -1);
  std::queue<std::size_t> q;
  level_[source_] = 0;
  q.push(source_);
  while (!q.empty()) {
    const std::size_t v = q.front();
    q.pop();
    for (const Arc& a : adj_[v]) {
      if (a.cap > kResidualEps && level_[a.to] < 0) {
        level_[a.to] = level_[v] + 1;
        q.push(a.to);
      }
    }
  }
  return level_[sink_] >= 0;
}

double MaxFlow::augment(std::size_t v, double pushed) {
  if (v == sink_) return pushed;
  for (std::size_t& i = next_arc_[v]; i < adj_[v].size(); ++i) {
    Arc& a = adj_[v][i];
    if (a.cap <= kResidualEps || level_[a.to] != level_[v] + 1) continue;
    const double got = augment(a.to, std::min(pushed, a.cap));
    if (got > 0.0) {
      a.cap -= got;
      adj_[a.to][a.rev].cap += got;
      return got;
    }
  }
  return 0.0;
}

double MaxFlow::solve() {
  double flow = 0.0;
  while (build_levels()) {
    next_arc_.assign(adj_.size(), 0);
    while (true) {
      const double got = augment(source_, std::numeric_limits<double>::infinity());
      if (got <= 0.0) break;
      flow += got;
    }
  }
  source_side_.assign(source_arc_.size(), 0);
  // level_ from the last (failed) BFS marks exactly the residual-reachable set.
  for (std::size_t v = 0; v < source_side_.size(); ++v) source_side_[v] = level_[v] >= 0 ? 1 : 0;
  return flow;
}

}  // namespace dtt
