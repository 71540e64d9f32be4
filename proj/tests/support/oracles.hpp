#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <algorithm>
#include <vector>

#include <Eigen/Dense>

#include "lrflow/netcore.hpp"

// Reference implementations used to cross-check the library. They share no
// code with it beyond the network container.
namespace lrflow::testing {

/// Does a balanced flow exist? Exhaustive search over flows that are
/// multiples of 0.5, valid when every capacity and inflow is one too.
inline bool brute_force_balanced_flow_exists(const FlowNetwork& net, const CapacityVector& c,
                                             const InflowVector& lambda) {
  const auto units = [](double x) { return static_cast<int>(std::lround(2.0 * x)); };
  std::vector<int> cap(static_cast<std::size_t>(c.size()));
  for (Eigen::Index e = 0; e < c.size(); ++e) cap[static_cast<std::size_t>(e)] = units(c[e]);
  std::vector<int> flow(cap.size(), 0);
  const auto nodes = net.nodes();

  std::function<bool(std::size_t)> visit_node;
  std::function<bool(std::size_t, std::size_t, int)> split;

  // Distribute `left` units over the out-edges of nodes[i], starting at slot k.
  split = [&](std::size_t i, std::size_t k, int left) -> bool {
    auto outs = net.out_edges(nodes[i]);
    if (k == outs.size()) return left == 0 && visit_node(i + 1);
    const auto e = static_cast<std::size_t>(outs[k]);
    int rest = 0;
    for (std::size_t j = k + 1; j < outs.size(); ++j) rest += cap[static_cast<std::size_t>(outs[j])];
    for (int f = std::max(0, left - rest); f <= std::min(cap[e], left); ++f) {
      flow[e] = f;
      if (split(i, k + 1, left - f)) return true;
    }
    flow[e] = 0;
    return false;
  };

  visit_node = [&](std::size_t i) -> bool {
    if (i == nodes.size()) return true;
    const NodeId v = nodes[i];
    if (net.is_destination(v)) return visit_node(i + 1);
    int in = net.is_origin(v) ? units(lambda[net.origin_slot(v)]) : 0;
    for (EdgeId e : net.in_edges(v)) in += flow[static_cast<std::size_t>(e)];
    return split(i, 0, in);
  };

  return visit_node(0);
}

/// Optimum of  sense c^T x  s.t.  A x <= b,  lo <= x <= hi  with finite bounds,
/// by enumerating every basic solution. Empty when infeasible.
struct VertexLp {
  Eigen::VectorXd objective;
  Eigen::MatrixXd a;
  Eigen::VectorXd b;
  Eigen::VectorXd lo;
  Eigen::VectorXd hi;
  bool maximize = false;
};

inline std::optional<double> vertex_enumeration_optimum(const VertexLp& lp, double tol = 1e-9) {
  const auto n = lp.objective.size();
  // All halfspaces g x <= h, bounds included.
  Eigen::MatrixXd g(lp.a.rows() + 2 * n, n);
  Eigen::VectorXd h(lp.a.rows() + 2 * n);
  g.topRows(lp.a.rows()) = lp.a;
  h.head(lp.a.rows()) = lp.b;
  for (Eigen::Index j = 0; j < n; ++j) {
    const auto r = lp.a.rows() + 2 * j;
    g.row(r).setZero();
    g(r, j) = 1.0;
    h[r] = lp.hi[j];
    g.row(r + 1).setZero();
    g(r + 1, j) = -1.0;
    h[r + 1] = -lp.lo[j];
  }

  std::optional<double> best;
  std::vector<Eigen::Index> pick(static_cast<std::size_t>(n));
  const auto rows = g.rows();
  std::function<void(Eigen::Index, Eigen::Index)> choose = [&](Eigen::Index depth, Eigen::Index from) {
    if (depth == n) {
      Eigen::MatrixXd m(n, n);
      Eigen::VectorXd r(n);
      for (Eigen::Index k = 0; k < n; ++k) {
        m.row(k) = g.row(pick[static_cast<std::size_t>(k)]);
        r[k] = h[pick[static_cast<std::size_t>(k)]];
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(m);
      if (!lu.isInvertible()) return;
      const Eigen::VectorXd x = lu.solve(r);
      const Eigen::VectorXd slack = g * x - h;
      for (Eigen::Index k = 0; k < rows; ++k) {
        if (slack[k] > tol * std::max(1.0, std::abs(h[k]))) return;
      }
      const double value = lp.objective.dot(x);
      if (!best || (lp.maximize ? value > *best : value < *best)) best = value;
      return;
    }
    for (Eigen::Index k = from; k <= rows - (n - depth); ++k) {
      pick[static_cast<std::size_t>(depth)] = k;
      choose(depth + 1, k + 1);
    }
  };
  choose(0, 0);
  return best;
}

/// Capacity polytope written out row by row: capacities in [0, avail] and,
/// for every non-destination v, lambda_v + in(v) - out(v) <= 0. With
/// `epigraph` a last variable s is added (right-hand side 0 becomes s) and
/// minimised; otherwise total capacity is maximised.
inline VertexLp safety_polytope_lp(const FlowNetwork& net, const Eigen::VectorXd& avail, const Eigen::VectorXd& lambda,
                                   bool epigraph, double s_box = 100.0) {
  const Eigen::Index m = net.edge_count();
  const Eigen::Index n = m + (epigraph ? 1 : 0);
  VertexLp lp;
  lp.objective = Eigen::VectorXd::Zero(n);
  lp.lo = Eigen::VectorXd::Zero(n);
  lp.hi = Eigen::VectorXd(n);
  lp.hi.head(m) = avail;
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  for (NodeId v : net.nodes()) {
    if (net.is_destination(v)) continue;
    Eigen::VectorXd row = Eigen::VectorXd::Zero(n);
    for (const Edge& e : net.edges()) {
      if (e.head == v) row[e.id] += 1.0;
      if (e.tail == v) row[e.id] -= 1.0;
    }
    if (epigraph) row[m] = -1.0;
    rows.push_back(row);
    rhs.push_back(net.is_origin(v) ? -lambda[net.origin_slot(v)] : 0.0);
  }
  lp.a = Eigen::MatrixXd(static_cast<Eigen::Index>(rows.size()), n);
  lp.b = Eigen::VectorXd(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t k = 0; k < rows.size(); ++k) {
    lp.a.row(static_cast<Eigen::Index>(k)) = rows[k].transpose();
    lp.b[static_cast<Eigen::Index>(k)] = rhs[k];
  }
  if (epigraph) {
    lp.lo[m] = -s_box;
    lp.hi[m] = s_box;
    lp.objective[m] = 1.0;
  } else {
    lp.objective.head(m).setOnes();
    lp.maximize = true;
  }
  return lp;
}

/// Straightforward cascade under proportional splitting, run to its fixed
/// point. Returns true when the limit is not a balanced flow.
inline bool reference_cascade_fails(const FlowNetwork& net, const Eigen::VectorXd& lambda, Eigen::VectorXd cap) {
  const int n = net.node_count();
  const Eigen::Index m = net.edge_count();
  Eigen::VectorXd flow = Eigen::VectorXd::Zero(m);
  auto inflow_at = [&](const Eigen::VectorXd& f) {
    Eigen::VectorXd mu = Eigen::VectorXd::Zero(n);
    for (NodeId v : net.origins()) mu[v.index()] = lambda[net.origin_slot(v)];
    for (const Edge& e : net.edges()) mu[e.head.index()] += f[e.id];
    return mu;
  };
  for (int iter = 0; iter < 10000; ++iter) {
    const Eigen::VectorXd mu = inflow_at(flow);
    Eigen::VectorXd outcap = Eigen::VectorXd::Zero(n);
    for (const Edge& e : net.edges()) outcap[e.tail.index()] += cap[e.id];
    Eigen::VectorXd next_cap = cap;
    Eigen::VectorXd next_flow = Eigen::VectorXd::Zero(m);
    for (const Edge& e : net.edges()) {
      const double share = outcap[e.tail.index()] > 0 ? mu[e.tail.index()] * cap[e.id] / outcap[e.tail.index()] : 0.0;
      const bool over = share > cap[e.id] * (1.0 + 1e-12);
      const bool dead = flow[e.id] > 0 && !net.is_destination(e.head) && outcap[e.head.index()] == 0.0;
      if (over || dead) {
        next_cap[e.id] = 0.0;
      } else {
        next_flow[e.id] = share;
      }
    }
    if (next_cap == cap && next_flow == flow) break;
    cap = next_cap;
    flow = next_flow;
  }
  const Eigen::VectorXd mu = inflow_at(flow);
  for (NodeId v : net.nodes()) {
    if (net.is_destination(v)) continue;
    double out = 0.0;
    for (const Edge& e : net.edges()) {
      if (e.tail == v) out += flow[e.id];
    }
    if (std::abs(out - mu[v.index()]) > 1e-9 * std::max(1.0, mu[v.index()])) return true;
  }
  return false;
}

}  // namespace lrflow::testing
