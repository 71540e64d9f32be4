#pragma once

#include <vector>

namespace lrflow {

/// Shortest-augmenting-path max-flow on real capacities. Augmenting paths
/// whose bottleneck is below the cutoff are ignored.
class MaxFlow {
 public:
  explicit MaxFlow(int node_count);

  /// Returns the arc handle used by flow().
  int add_arc(int from, int to, double capacity);

  double solve(int source, int sink, double cutoff = 1e-9);

  double flow(int arc) const;

 private:
  struct Arc {
    int to;
    double residual;
    double capacity;
  };

  std::vector<Arc> arcs_;  // arc k and k ^ 1 are a forward/reverse pair
  std::vector<std::vector<int>> adjacency_;
};

}  // namespace lrflow
