#include "lrflow/netcore.hpp"

#include <algorithm>
#include <functional>
#include <queue>

namespace lrflow {

const Edge& FlowNetwork::edge(EdgeId e) const {
  if (e < 0 || e >= edge_count()) {
    throw NetworkError("unknown edge " + std::to_string(e));
  }
  return edges_[static_cast<std::size_t>(e)];
}

void FlowNetwork::check_node(NodeId v) const {
  if (!contains(v)) {
    throw NetworkError("unknown node " + std::to_string(v.value));
  }
}

std::span<const EdgeId> FlowNetwork::out_edges(NodeId v) const {
  check_node(v);
  return out_[static_cast<std::size_t>(v.index())];
}

std::span<const EdgeId> FlowNetwork::in_edges(NodeId v) const {
  check_node(v);
  return in_[static_cast<std::size_t>(v.index())];
}

std::vector<NodeId> FlowNetwork::out_neighbors(NodeId v) const {
  std::vector<NodeId> heads;
  for (EdgeId e : out_edges(v)) heads.push_back(edges_[static_cast<std::size_t>(e)].head);
  std::sort(heads.begin(), heads.end());
  heads.erase(std::unique(heads.begin(), heads.end()), heads.end());
  return heads;
}

NodeRole FlowNetwork::role(NodeId v) const {
  check_node(v);
  return roles_[static_cast<std::size_t>(v.index())];
}

std::vector<NodeId> FlowNetwork::nodes() const {
  std::vector<NodeId> all;
  all.reserve(out_.size());
  for (int k = 1; k <= node_count(); ++k) all.push_back(NodeId{k});
  return all;
}

Eigen::Index FlowNetwork::origin_slot(NodeId v) const {
  check_node(v);
  return origin_slot_[static_cast<std::size_t>(v.index())];
}

NodeId FlowNetwork::original_label(NodeId v) const {
  check_node(v);
  return NodeId{to_original_[static_cast<std::size_t>(v.index())]};
}

NodeId FlowNetwork::relabeled(NodeId original) const {
  check_node(original);
  return NodeId{to_internal_[static_cast<std::size_t>(original.index())]};
}

bool FlowNetwork::was_relabeled() const {
  for (std::size_t k = 0; k < to_internal_.size(); ++k) {
    if (to_internal_[k] != static_cast<int>(k) + 1) return true;
  }
  return false;
}

FlowNetwork build_network(int node_count, std::span<const std::pair<int, int>> edge_list) {
  if (node_count < 2) throw NetworkError("a flow network needs at least two nodes");
  if (edge_list.empty()) throw NetworkError("edge list is empty");

  const auto n = static_cast<std::size_t>(node_count);
  std::vector<std::vector<std::size_t>> succ(n);
  std::vector<int> indegree(n, 0);
  for (std::size_t k = 0; k < edge_list.size(); ++k) {
    auto [tail, head] = edge_list[k];
    if (tail < 1 || tail > node_count || head < 1 || head > node_count) {
      throw NetworkError("edge " + std::to_string(k) + " (" + std::to_string(tail) + "," +
                         std::to_string(head) + ") references a node outside 1.." +
                         std::to_string(node_count));
    }
    if (tail == head) {
      throw NetworkError("edge " + std::to_string(k) + " is a self-loop at node " +
                         std::to_string(tail));
    }
    succ[static_cast<std::size_t>(tail - 1)].push_back(static_cast<std::size_t>(head - 1));
    ++indegree[static_cast<std::size_t>(head - 1)];
  }

  // Kahn's algorithm, smallest input label first.
  std::priority_queue<std::size_t, std::vector<std::size_t>, std::greater<>> ready;
  for (std::size_t v = 0; v < n; ++v) {
    if (indegree[v] == 0) ready.push(v);
  }
  std::vector<int> to_internal(n, 0);
  int next_label = 1;
  while (!ready.empty()) {
    std::size_t v = ready.top();
    ready.pop();
    to_internal[v] = next_label++;
    for (std::size_t w : succ[v]) {
      if (--indegree[w] == 0) ready.push(w);
    }
  }
  if (next_label != node_count + 1) throw NetworkError("cycle detected");

  FlowNetwork net;
  net.to_internal_ = to_internal;
  net.to_original_.assign(n, 0);
  for (std::size_t v = 0; v < n; ++v) {
    net.to_original_[static_cast<std::size_t>(to_internal[v] - 1)] = static_cast<int>(v) + 1;
  }

  net.out_.assign(n, {});
  net.in_.assign(n, {});
  net.edges_.reserve(edge_list.size());
  for (std::size_t k = 0; k < edge_list.size(); ++k) {
    NodeId tail{to_internal[static_cast<std::size_t>(edge_list[k].first - 1)]};
    NodeId head{to_internal[static_cast<std::size_t>(edge_list[k].second - 1)]};
    auto id = static_cast<EdgeId>(k);
    net.edges_.push_back(Edge{id, tail, head});
    net.out_[static_cast<std::size_t>(tail.index())].push_back(id);
    net.in_[static_cast<std::size_t>(head.index())].push_back(id);
  }

  net.roles_.resize(n);
  net.origin_slot_.assign(n, -1);
  for (std::size_t v = 0; v < n; ++v) {
    NodeId id{static_cast<int>(v) + 1};
    bool no_in = net.in_[v].empty();
    bool no_out = net.out_[v].empty();
    if (no_in && no_out) {
      throw NetworkError("node " + std::to_string(net.to_original_[v]) +
                         " is isolated (both origin and destination)");
    }
    if (no_out) {
      net.roles_[v] = NodeRole::Destination;
      net.destinations_.push_back(id);
    } else if (no_in) {
      net.roles_[v] = NodeRole::Origin;
      net.origin_slot_[v] = static_cast<Eigen::Index>(net.origins_.size());
      net.origins_.push_back(id);
    } else {
      net.roles_[v] = NodeRole::Intermediate;
      net.intermediates_.push_back(id);
    }
  }
  if (net.origins_.empty()) throw NetworkError("network has no origin node");

  // Backward sweep over the monotone labels.
  std::vector<char> reaches_sink(n, 0);
  for (std::size_t v = n; v-- > 0;) {
    if (net.roles_[v] == NodeRole::Destination) {
      reaches_sink[v] = 1;
      continue;
    }
    for (EdgeId e : net.out_[v]) {
      if (reaches_sink[static_cast<std::size_t>(net.edges_[static_cast<std::size_t>(e)].head.index())]) {
        reaches_sink[v] = 1;
        break;
      }
    }
    if (!reaches_sink[v]) {
      throw NetworkError("node " + std::to_string(net.to_original_[v]) +
                         " has no path to a destination");
    }
  }
  return net;
}

std::vector<NodeId> reachable_from(const FlowNetwork& net, NodeId v) {
  std::vector<char> seen(static_cast<std::size_t>(net.node_count()), 0);
  std::vector<NodeId> stack;
  for (EdgeId e : net.out_edges(v)) stack.push_back(net.edge(e).head);
  while (!stack.empty()) {
    NodeId u = stack.back();
    stack.pop_back();
    auto& mark = seen[static_cast<std::size_t>(u.index())];
    if (mark) continue;
    mark = 1;
    for (EdgeId e : net.out_edges(u)) stack.push_back(net.edge(e).head);
  }
  std::vector<NodeId> out;
  for (int k = 1; k <= net.node_count(); ++k) {
    if (seen[static_cast<std::size_t>(k - 1)]) out.push_back(NodeId{k});
  }
  return out;
}

CutSets cut_edges(const FlowNetwork& net, std::span<const NodeId> subset) {
  std::vector<char> inside(static_cast<std::size_t>(net.node_count()), 0);
  for (NodeId v : subset) {
    if (!net.contains(v)) throw NetworkError("unknown node " + std::to_string(v.value));
    inside[static_cast<std::size_t>(v.index())] = 1;
  }
  CutSets cut;
  for (const Edge& e : net.edges()) {
    bool tail_in = inside[static_cast<std::size_t>(e.tail.index())];
    bool head_in = inside[static_cast<std::size_t>(e.head.index())];
    if (!tail_in && head_in) cut.incoming.push_back(e.id);
    if (tail_in && !head_in) cut.outgoing.push_back(e.id);
  }
  return cut;
}

int longest_path_length(const FlowNetwork& net) {
  std::vector<int> depth(static_cast<std::size_t>(net.node_count()), 0);
  int longest = 0;
  for (NodeId v : net.nodes()) {
    int d = 0;
    for (EdgeId e : net.in_edges(v)) {
      d = std::max(d, depth[static_cast<std::size_t>(net.edge(e).tail.index())] + 1);
    }
    depth[static_cast<std::size_t>(v.index())] = d;
    longest = std::max(longest, d);
  }
  return longest;
}

double out_capacity(const FlowNetwork& net, const CapacityVector& c, NodeId v) {
  double total = 0.0;
  for (EdgeId e : net.out_edges(v)) total += c[e];
  return total;
}

double in_capacity(const FlowNetwork& net, const CapacityVector& c, NodeId v) {
  double total = 0.0;
  for (EdgeId e : net.in_edges(v)) total += c[e];
  return total;
}

Vector<double> restrict_to(const Vector<double>& x, std::span<const EdgeId> edges) {
  Vector<double> out(static_cast<Eigen::Index>(edges.size()));
  for (std::size_t k = 0; k < edges.size(); ++k) out[static_cast<Eigen::Index>(k)] = x[edges[k]];
  return out;
}

Vector<double> node_injection(const FlowNetwork& net, const InflowVector& lambda) {
  if (lambda.size() != static_cast<Eigen::Index>(net.origins().size())) {
    throw NetworkError("inflow vector has " + std::to_string(lambda.size()) +
                       " entries but the network has " + std::to_string(net.origins().size()) +
                       " origins");
  }
  Vector<double> mu = Vector<double>::Zero(net.node_count());
  for (std::size_t k = 0; k < net.origins().size(); ++k) {
    mu[net.origins()[k].index()] = lambda[static_cast<Eigen::Index>(k)];
  }
  return mu;
}

std::string to_string(NodeRole role) {
  switch (role) {
    case NodeRole::Origin: return "origin";
    case NodeRole::Intermediate: return "intermediate";
    case NodeRole::Destination: return "destination";
  }
  return "unknown";
}

}  // namespace lrflow
