#include "lrflow/analysis.hpp"

#include <algorithm>
#include <numeric>
#include <cmath>
#include <functional>
#include <limits>
#include <stdexcept>

#include "lrflow/maxflow.hpp"

namespace lrflow {

FeasibilityResult feasible_balanced_flow(const FlowNetwork& net, const CapacityVector& c,
                                         const InflowVector& lambda) {
  const int n = net.node_count();
  const int source = n;
  const int sink = n + 1;
  const double demand = lambda.sum();

  MaxFlow mf(n + 2);
  for (std::size_t k = 0; k < net.origins().size(); ++k) {
    mf.add_arc(source, static_cast<int>(net.origins()[k].index()), lambda[static_cast<Eigen::Index>(k)]);
  }
  std::vector<int> arc_of_edge;
  arc_of_edge.reserve(static_cast<std::size_t>(net.edge_count()));
  for (const Edge& e : net.edges()) {
    arc_of_edge.push_back(
        mf.add_arc(static_cast<int>(e.tail.index()), static_cast<int>(e.head.index()), c[e.id]));
  }
  for (NodeId d : net.destinations()) mf.add_arc(static_cast<int>(d.index()), sink, demand);

  const double routed = mf.solve(source, sink, kAugmentCutoff);
  FeasibilityResult result;
  const double shortfall = demand - routed;
  result.feasible = shortfall <= kAugmentCutoff * std::max(1.0, demand);
  if (result.feasible) {
    FlowVector f(net.edge_count());
    for (const Edge& e : net.edges()) {
      f[e.id] = std::clamp(mf.flow(arc_of_edge[static_cast<std::size_t>(e.id)]), 0.0, c[e.id]);
    }
    result.witness = std::move(f);
  } else {
    result.deficit = shortfall;
  }
  return result;
}

bool in_lambda_set(const FlowNetwork& net, const CapacityVector& c, const InflowVector& lambda) {
  return feasible_balanced_flow(net, c, lambda).feasible;
}

FeasibleSetReport check_feasible_set_monotone(const FlowNetwork& net, const CapacityVector& c,
                                              const CapacityVector& reduced,
                                              std::span<const InflowVector> samples) {
  if (reduced.size() != c.size() || ((reduced - c).array() > 0.0).any()) {
    throw std::invalid_argument("reduced capacities must not exceed the reference capacities");
  }
  FeasibleSetReport report;
  report.samples = static_cast<int>(samples.size());
  for (const InflowVector& lambda : samples) {
    if (in_lambda_set(net, reduced, lambda) && !in_lambda_set(net, c, lambda)) {
      report.violations.push_back(lambda);
    }
  }
  return report;
}

std::string to_token(ResilienceMode mode) {
  switch (mode) {
    case ResilienceMode::SingleEdge: return "single_edge";
    case ResilienceMode::PerNode: return "per_node";
    case ResilienceMode::FullGrid: return "full_grid";
  }
  return "unknown";
}

ResilienceMode resilience_mode_from(std::string_view token) {
  if (token == "single_edge") return ResilienceMode::SingleEdge;
  if (token == "per_node") return ResilienceMode::PerNode;
  if (token == "full_grid") return ResilienceMode::FullGrid;
  throw std::invalid_argument("unknown resilience mode '" + std::string(token) +
                              "' (valid: single_edge, per_node, full_grid)");
}

namespace {

class ResilienceSearch {
 public:
  ResilienceSearch(const FlowNetwork& net, const RoutingPolicy& policy, const InflowVector& lambda,
                   const CapacityVector& c)
      : net_(net), policy_(policy), lambda_(lambda), c_(c) {
    result_.value = std::numeric_limits<double>::infinity();
    result_.witness_delta = CapacityVector::Zero(c.size());
  }

  bool breaks(const CapacityVector& delta) {
    ++result_.candidates;
    CapacityVector reduced = (c_ - delta).cwiseMax(0.0);
    SimulationOptions opts;
    opts.recording = Recording::EventsOnly;
    return simulate(net_, policy_, lambda_, reduced, opts).verdict == Verdict::NonTransferring;
  }

  // Keeps the cheaper delta; equal totals go to the lexicographically smaller one.
  void offer(const CapacityVector& delta) {
    const double value = delta.sum();
    const double tie = 1e-12 * std::max(1.0, value);
    bool better = !result_.found || value < result_.value - tie;
    if (!better && std::abs(value - result_.value) <= tie) {
      better = std::lexicographical_compare(delta.data(), delta.data() + delta.size(),
                                            result_.witness_delta.data(),
                                            result_.witness_delta.data() + delta.size());
    }
    if (better) {
      result_.found = true;
      result_.value = value;
      result_.witness_delta = delta;
    }
  }

  double best() const { return result_.found ? result_.value : std::numeric_limits<double>::infinity(); }
  ResilienceResult& result() { return result_; }

 private:
  const FlowNetwork& net_;
  const RoutingPolicy& policy_;
  const InflowVector& lambda_;
  const CapacityVector& c_;
  ResilienceResult result_;
};

int grid_units(double capacity, double step) {
  return static_cast<int>(std::ceil(capacity / step - 1e-9));
}

}  // namespace

ResilienceResult resilience_search(const FlowNetwork& net, const RoutingPolicy& policy,
                                   const InflowVector& lambda, const CapacityVector& c, double grid_step,
                                   ResilienceMode mode) {
  if (!(grid_step > 0.0)) throw std::invalid_argument("grid_step must be positive");
  const Eigen::Index m = net.edge_count();
  if (c.size() != m) throw NetworkError("capacity vector does not match the network");

  std::vector<int> units(static_cast<std::size_t>(m));
  for (Eigen::Index e = 0; e < m; ++e) units[static_cast<std::size_t>(e)] = grid_units(c[e], grid_step);

  if (mode == ResilienceMode::FullGrid) {
    if (m > kFullGridMaxEdges) {
      throw std::invalid_argument("full_grid search supports at most " + std::to_string(kFullGridMaxEdges) +
                                  " edges");
    }
    if (*std::max_element(units.begin(), units.end()) > kFullGridMaxUnits) {
      throw std::invalid_argument("full_grid search supports at most " + std::to_string(kFullGridMaxUnits) +
                                  " grid steps per edge; increase grid_step");
    }
  }

  ResilienceSearch search(net, policy, lambda, c);
  if (search.breaks(CapacityVector::Zero(m))) {
    search.offer(CapacityVector::Zero(m));
    search.result().exact = true;
    return search.result();
  }

  auto grid_delta = [&](Eigen::Index e, int k) { return std::min(k * grid_step, c[e]); };

  switch (mode) {
    case ResilienceMode::SingleEdge:
      for (Eigen::Index e = 0; e < m; ++e) {
        for (int k = 1; k <= units[static_cast<std::size_t>(e)]; ++k) {
          if (grid_delta(e, k) > search.best()) break;
          CapacityVector delta = CapacityVector::Zero(m);
          delta[e] = grid_delta(e, k);
          if (search.breaks(delta)) {
            search.offer(delta);
            break;
          }
        }
      }
      break;

    case ResilienceMode::PerNode:
      for (NodeId v : net.nodes()) {
        auto outs = net.out_edges(v);
        const double total = out_capacity(net, c, v);
        if (outs.empty() || total <= 0.0) continue;
        const int steps = grid_units(total, grid_step);
        for (int k = 1; k <= steps; ++k) {
          const double theta = std::min(k * grid_step / total, 1.0);
          if (theta * total > search.best()) break;
          CapacityVector delta = CapacityVector::Zero(m);
          for (EdgeId e : outs) delta[e] = theta * c[e];
          if (search.breaks(delta)) {
            search.offer(delta);
            break;
          }
        }
      }
      break;

    case ResilienceMode::FullGrid: {
      search.result().exact = true;
      const int max_level = std::accumulate(units.begin(), units.end(), 0);
      std::vector<int> pick(static_cast<std::size_t>(m), 0);
      // All unit vectors with the given total, in lexicographic order.
      std::function<void(Eigen::Index, int)> enumerate = [&](Eigen::Index e, int remaining) {
        if (e == m - 1) {
          if (remaining > units[static_cast<std::size_t>(e)]) return;
          pick[static_cast<std::size_t>(e)] = remaining;
          CapacityVector delta(m);
          for (Eigen::Index j = 0; j < m; ++j) delta[j] = grid_delta(j, pick[static_cast<std::size_t>(j)]);
          if (search.breaks(delta)) search.offer(delta);
          return;
        }
        const int top = std::min(remaining, units[static_cast<std::size_t>(e)]);
        for (int k = 0; k <= top; ++k) {
          pick[static_cast<std::size_t>(e)] = k;
          enumerate(e + 1, remaining - k);
        }
      };
      for (int level = 1; level <= max_level && !search.result().found; ++level) enumerate(0, level);
      break;
    }
  }
  return search.result();
}

bool check_lemma1(const FlowNetwork& net, const CapacityVector& c, const InflowVector& lambda,
                  double tolerance) {
  for (std::size_t k = 0; k < net.origins().size(); ++k) {
    const double out = out_capacity(net, c, net.origins()[k]);
    if (lambda[static_cast<Eigen::Index>(k)] > out + tolerance * std::max(1.0, out)) return false;
  }
  for (NodeId v : net.intermediates()) {
    const double out = out_capacity(net, c, v);
    if (in_capacity(net, c, v) > out + tolerance * std::max(1.0, out)) return false;
  }
  return true;
}

bool has_branching_into_intermediate(const FlowNetwork& net, NodeId v) {
  auto heads = net.out_neighbors(v);
  if (heads.size() < 2) return false;
  return std::any_of(heads.begin(), heads.end(), [&](NodeId w) { return !net.is_destination(w); });
}

Theorem1Instance construct_theorem1_instance(const FlowNetwork& net, NodeId v, const InflowVector& lambda,
                                             double bump) {
  if (!has_branching_into_intermediate(net, v)) {
    throw std::invalid_argument("node " + std::to_string(v.value) +
                                " needs outgoing links to two or more nodes, one of them intermediate");
  }
  if (lambda.size() != static_cast<Eigen::Index>(net.origins().size())) {
    throw std::invalid_argument("inflow vector does not match the origins");
  }
  if (!(lambda.array() > 0.0).all()) throw std::invalid_argument("every origin inflow must be positive");
  if (!(bump > 0.0)) throw std::invalid_argument("bump must be positive");

  Theorem1Instance inst;
  inst.lambda = lambda;
  inst.base = CapacityVector::Zero(net.edge_count());
  // Monotone labels: in-capacity of u is final before u is visited.
  for (NodeId u : net.nodes()) {
    auto outs = net.out_edges(u);
    if (outs.empty()) continue;
    const double required = net.is_origin(u) ? lambda[net.origin_slot(u)] : in_capacity(net, inst.base, u);
    for (EdgeId e : outs) inst.base[e] = required / static_cast<double>(outs.size());
  }

  for (NodeId head : net.out_neighbors(v)) {
    if (net.is_intermediate(head)) {
      inst.w = head;
      break;
    }
  }
  inst.raised = inst.base;
  for (EdgeId e : net.out_edges(v)) {
    if (net.edge(e).head == inst.w) inst.raised[e] += bump;
  }
  return inst;
}

bool check_theorem2_topology(const FlowNetwork& net) {
  for (NodeId v : net.nodes()) {
    if (has_branching_into_intermediate(net, v)) return false;
  }
  return true;
}

CapacityVector safe_capacity_reduction(const FlowNetwork& net, const CapacityVector& c,
                                       const InflowVector& lambda) {
  FeasibilityResult fr = feasible_balanced_flow(net, c, lambda);
  if (!fr.feasible) {
    throw std::invalid_argument("inflow admits no balanced flow (deficit " + std::to_string(fr.deficit) + ")");
  }
  return *fr.witness;
}

}  // namespace lrflow
