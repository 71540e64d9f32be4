#include "lrflow/maxflow.hpp"

#include <algorithm>
#include <limits>
#include <queue>
#include <stdexcept>

namespace lrflow {

MaxFlow::MaxFlow(int node_count) : adjacency_(static_cast<std::size_t>(node_count)) {}

int MaxFlow::add_arc(int from, int to, double capacity) {
  if (capacity < 0.0) throw std::invalid_argument("negative arc capacity");
  const int id = static_cast<int>(arcs_.size());
  arcs_.push_back({to, capacity, capacity});
  arcs_.push_back({from, 0.0, 0.0});
  adjacency_[static_cast<std::size_t>(from)].push_back(id);
  adjacency_[static_cast<std::size_t>(to)].push_back(id + 1);
  return id;
}

double MaxFlow::flow(int arc) const {
  const Arc& a = arcs_[static_cast<std::size_t>(arc)];
  return a.capacity - a.residual;
}

double MaxFlow::solve(int source, int sink, double cutoff) {
  const auto n = adjacency_.size();
  double total = 0.0;
  std::vector<int> parent_arc(n);
  for (;;) {
    // BFS over arcs with usable residual; fewest-edge path first.
    std::fill(parent_arc.begin(), parent_arc.end(), -1);
    std::queue<int> frontier;
    frontier.push(source);
    parent_arc[static_cast<std::size_t>(source)] = -2;
    while (!frontier.empty() && parent_arc[static_cast<std::size_t>(sink)] == -1) {
      int u = frontier.front();
      frontier.pop();
      for (int id : adjacency_[static_cast<std::size_t>(u)]) {
        const Arc& a = arcs_[static_cast<std::size_t>(id)];
        if (a.residual > cutoff && parent_arc[static_cast<std::size_t>(a.to)] == -1) {
          parent_arc[static_cast<std::size_t>(a.to)] = id;
          frontier.push(a.to);
        }
      }
    }
    if (parent_arc[static_cast<std::size_t>(sink)] == -1) break;

    double bottleneck = std::numeric_limits<double>::infinity();
    for (int v = sink; v != source;) {
      const int id = parent_arc[static_cast<std::size_t>(v)];
      bottleneck = std::min(bottleneck, arcs_[static_cast<std::size_t>(id)].residual);
      v = arcs_[static_cast<std::size_t>(id ^ 1)].to;
    }
    for (int v = sink; v != source;) {
      const int id = parent_arc[static_cast<std::size_t>(v)];
      arcs_[static_cast<std::size_t>(id)].residual -= bottleneck;
      arcs_[static_cast<std::size_t>(id ^ 1)].residual += bottleneck;
      v = arcs_[static_cast<std::size_t>(id ^ 1)].to;
    }
    total += bottleneck;
  }
  return total;
}

}  // namespace lrflow
