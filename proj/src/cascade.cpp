#include "lrflow/cascade.hpp"

#include <algorithm>
#include <cmath>

namespace lrflow {

std::string to_token(Verdict v) {
  switch (v) {
    case Verdict::SafelyTransferring: return "SAFE";
    case Verdict::Transferring: return "TRANSFERRING";
    case Verdict::NonTransferring: return "NON_TRANSFERRING";
  }
  return "UNKNOWN";
}

std::string to_token(FailureCause c) {
  return c == FailureCause::Overload ? "overload" : "dead-downstream";
}

namespace {

void check_dimensions(const FlowNetwork& net, const InflowVector& lambda, const Vector<double>& edge_vec,
                      const char* what) {
  if (edge_vec.size() != net.edge_count()) {
    throw NetworkError(std::string(what) + " has " + std::to_string(edge_vec.size()) +
                       " entries, expected " + std::to_string(net.edge_count()));
  }
  if (lambda.size() != static_cast<Eigen::Index>(net.origins().size())) {
    throw NetworkError("inflow has " + std::to_string(lambda.size()) + " entries, expected " +
                       std::to_string(net.origins().size()));
  }
}

}  // namespace

Vector<double> node_inflows(const FlowNetwork& net, const InflowVector& lambda, const FlowVector& flows) {
  Vector<double> mu = node_injection(net, lambda);
  for (const Edge& e : net.edges()) mu[e.head.index()] += flows[e.id];
  return mu;
}

CascadeState initial_state(const FlowNetwork& net, const InflowVector& lambda, const CapacityVector& c0) {
  check_dimensions(net, lambda, c0, "capacity vector");
  CascadeState s;
  s.t = 0;
  s.capacities = c0;
  s.flows = FlowVector::Zero(net.edge_count());
  s.node_inflows = node_inflows(net, lambda, s.flows);
  return s;
}

CascadeState step(const FlowNetwork& net, const RoutingPolicy& policy, const InflowVector& lambda,
                  const CascadeState& state, std::vector<FailureEvent>* events) {
  const Vector<double> mu = node_inflows(net, lambda, state.flows);

  Vector<double> out_cap = Vector<double>::Zero(net.node_count());
  for (const Edge& e : net.edges()) out_cap[e.tail.index()] += state.capacities[e.id];

  CascadeState next;
  next.t = state.t + 1;
  next.capacities = state.capacities;
  next.flows = FlowVector::Zero(net.edge_count());

  for (NodeId v : net.nodes()) {
    auto outs = net.out_edges(v);
    if (outs.empty()) continue;

    // With no outgoing capacity the node cannot route; its out-edges are
    // already (0, 0) and its in-edges fail on the downstream test below.
    Vector<double> routed = Vector<double>::Zero(static_cast<Eigen::Index>(outs.size()));
    if (out_cap[v.index()] > 0.0) routed = policy(restrict_to(state.capacities, outs), mu[v.index()]);

    for (std::size_t k = 0; k < outs.size(); ++k) {
      const EdgeId e = outs[k];
      const double cap = state.capacities[e];
      const double flow = routed[static_cast<Eigen::Index>(k)];
      const NodeId head = net.edge(e).head;

      const bool overload = flow > cap * (1.0 + kOverloadGuard);
      const bool dead = state.flows[e] > 0.0 && !net.is_destination(head) && out_cap[head.index()] == 0.0;
      if (overload || dead) {
        next.capacities[e] = 0.0;
        next.flows[e] = 0.0;
        if (cap > 0.0 && events) {
          events->push_back({next.t, e, overload ? FailureCause::Overload : FailureCause::DeadDownstream});
        }
      } else {
        next.flows[e] = flow;
      }
    }
  }
  next.node_inflows = node_inflows(net, lambda, next.flows);
  return next;
}

int auto_horizon(const FlowNetwork& net) {
  return static_cast<int>(net.edge_count() + 1) * (longest_path_length(net) + 1);
}

Trajectory simulate(const FlowNetwork& net, const RoutingPolicy& policy, const InflowVector& lambda,
                    const CapacityVector& c0, const SimulationOptions& options) {
  if ((c0.array() < 0.0).any()) throw NetworkError("capacities must be nonnegative");
  if ((lambda.array() < 0.0).any()) throw NetworkError("inflows must be nonnegative");
  const int horizon = options.horizon.value_or(auto_horizon(net));

  Trajectory traj;
  CascadeState current = initial_state(net, lambda, c0);
  if (options.recording == Recording::Full) traj.states.push_back(current);

  for (int t = 0; t <= horizon; ++t) {
    CascadeState next = step(net, policy, lambda, current, &traj.events);
    if (next.same_point(current)) {
      traj.limit = std::move(current);
      traj.verdict = classify(net, lambda, traj.limit.capacities, traj.limit.flows, c0);
      return traj;
    }
    current = std::move(next);
    if (options.recording == Recording::Full) traj.states.push_back(current);
  }
  throw CascadeError("no fixed point within " + std::to_string(horizon) + " steps");
}

bool is_balanced_feasible(const FlowNetwork& net, const InflowVector& lambda, const CapacityVector& c,
                          const FlowVector& f, double tolerance) {
  if ((f.array() < 0.0).any()) return false;
  if (((f - c).array() > tolerance).any()) return false;

  Vector<double> balance = node_injection(net, lambda);
  Vector<double> scale = balance.cwiseAbs();
  for (const Edge& e : net.edges()) {
    balance[e.head.index()] += f[e.id];
    balance[e.tail.index()] -= f[e.id];
    scale[e.head.index()] += f[e.id];
  }
  for (NodeId v : net.nodes()) {
    if (net.is_destination(v)) continue;
    if (std::abs(balance[v.index()]) > tolerance * std::max(1.0, scale[v.index()])) return false;
  }
  return true;
}

Verdict classify(const FlowNetwork& net, const InflowVector& lambda, const CapacityVector& c_star,
                 const FlowVector& f_star, const CapacityVector& c0) {
  check_dimensions(net, lambda, c_star, "limit capacity vector");
  check_dimensions(net, lambda, f_star, "limit flow vector");
  check_dimensions(net, lambda, c0, "initial capacity vector");
  if (!is_balanced_feasible(net, lambda, c_star, f_star)) return Verdict::NonTransferring;
  return c_star == c0 ? Verdict::SafelyTransferring : Verdict::Transferring;
}

}  // namespace lrflow
