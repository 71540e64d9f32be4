#pragma once

#include <compare>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

namespace lrflow {

/// Node label in 1..n. After construction every edge satisfies tail < head.
struct NodeId {
  int value = 0;

  constexpr Eigen::Index index() const { return value - 1; }
  friend constexpr auto operator<=>(NodeId, NodeId) = default;
};

/// Stable edge ordinal; position in the input edge list. Every per-edge
/// vector in the library is indexed by it.
using EdgeId = Eigen::Index;

struct Edge {
  EdgeId id = 0;
  NodeId tail;
  NodeId head;
};

enum class NodeRole { Origin, Intermediate, Destination };

template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;

/// Per-edge capacities C, indexed by EdgeId.
using CapacityVector = Vector<double>;
/// Per-edge flows f, indexed by EdgeId.
using FlowVector = Vector<double>;
/// External inflow lambda, one entry per origin in FlowNetwork::origins() order.
using InflowVector = Vector<double>;

class NetworkError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CutSets {
  std::vector<EdgeId> incoming;
  std::vector<EdgeId> outgoing;
};

/// Acyclic directed multigraph with the origin / intermediate / destination
/// split. Immutable once built; obtain one through build_network().
class FlowNetwork {
 public:
  int node_count() const { return static_cast<int>(out_.size()); }
  Eigen::Index edge_count() const { return static_cast<Eigen::Index>(edges_.size()); }

  std::span<const Edge> edges() const { return edges_; }
  const Edge& edge(EdgeId e) const;

  std::span<const EdgeId> out_edges(NodeId v) const;
  std::span<const EdgeId> in_edges(NodeId v) const;
  /// Distinct heads of the outgoing edges, ascending.
  std::vector<NodeId> out_neighbors(NodeId v) const;

  NodeRole role(NodeId v) const;
  bool is_origin(NodeId v) const { return role(v) == NodeRole::Origin; }
  bool is_destination(NodeId v) const { return role(v) == NodeRole::Destination; }
  bool is_intermediate(NodeId v) const { return role(v) == NodeRole::Intermediate; }
  bool contains(NodeId v) const { return v.value >= 1 && v.value <= node_count(); }

  std::vector<NodeId> nodes() const;
  const std::vector<NodeId>& origins() const { return origins_; }
  const std::vector<NodeId>& intermediates() const { return intermediates_; }
  const std::vector<NodeId>& destinations() const { return destinations_; }

  /// Position of origin v inside InflowVector, or -1 for non-origins.
  Eigen::Index origin_slot(NodeId v) const;

  /// Label the caller used for internal node v.
  NodeId original_label(NodeId v) const;
  /// Internal label of the caller's node `original`.
  NodeId relabeled(NodeId original) const;
  /// permutation()[k] is the internal label of input node k+1.
  const std::vector<int>& permutation() const { return to_internal_; }
  bool was_relabeled() const;

 private:
  friend FlowNetwork build_network(int, std::span<const std::pair<int, int>>);

  void check_node(NodeId v) const;

  std::vector<Edge> edges_;
  std::vector<std::vector<EdgeId>> out_;
  std::vector<std::vector<EdgeId>> in_;
  std::vector<NodeRole> roles_;
  std::vector<NodeId> origins_;
  std::vector<NodeId> intermediates_;
  std::vector<NodeId> destinations_;
  std::vector<Eigen::Index> origin_slot_;
  std::vector<int> to_internal_;
  std::vector<int> to_original_;
};

/// Validates an edge list over nodes 1..node_count and relabels the nodes so
/// that every edge runs from a smaller to a larger label. The relabeling is a
/// topological sort that always emits the smallest available input label, so
/// an input that is already monotone keeps its labels.
///
/// Throws NetworkError on an empty edge list, out-of-range endpoints,
/// self-loops, cycles, isolated nodes, or nodes without a path to a
/// destination.
FlowNetwork build_network(int node_count, std::span<const std::pair<int, int>> edge_list);

inline FlowNetwork build_network(int node_count,
                                 std::initializer_list<std::pair<int, int>> edge_list) {
  return build_network(node_count, std::span<const std::pair<int, int>>(edge_list.begin(), edge_list.size()));
}

/// Nodes reachable from v over at least one edge, ascending.
std::vector<NodeId> reachable_from(const FlowNetwork& net, NodeId v);

/// Edges entering and leaving the node set U.
CutSets cut_edges(const FlowNetwork& net, std::span<const NodeId> subset);

/// Longest origin-to-destination path, counted in edges.
int longest_path_length(const FlowNetwork& net);

/// Sum of C over the outgoing (incoming) edges of v.
double out_capacity(const FlowNetwork& net, const CapacityVector& c, NodeId v);
double in_capacity(const FlowNetwork& net, const CapacityVector& c, NodeId v);

/// Gathers x restricted to the given edges.
Vector<double> restrict_to(const Vector<double>& x, std::span<const EdgeId> edges);

/// Spreads lambda over a per-node vector (zero at non-origins), indexed by NodeId::index().
Vector<double> node_injection(const FlowNetwork& net, const InflowVector& lambda);

std::string to_string(NodeRole role);

}  // namespace lrflow
