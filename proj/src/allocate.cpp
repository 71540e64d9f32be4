#include "lrflow/allocate.hpp"

#include <algorithm>
#include <limits>
#include <random>

#include "lrflow/analysis.hpp"
#include "lrflow/routing.hpp"

namespace lrflow {

AllocationProblem::AllocationProblem(FlowNetwork net, CapacityVector available, InflowVector max_inflow,
                                     AllocationObjective objective)
    : net_(std::move(net)),
      available_(std::move(available)),
      max_inflow_(std::move(max_inflow)),
      objective_(std::move(objective)) {
  if (available_.size() != net_.edge_count()) throw std::invalid_argument("available capacities do not match the edges");
  if (max_inflow_.size() != static_cast<Eigen::Index>(net_.origins().size())) {
    throw std::invalid_argument("maximal inflow does not match the origins");
  }
  if ((available_.array() < 0.0).any() || (max_inflow_.array() < 0.0).any()) {
    throw std::invalid_argument("capacities and inflows must be nonnegative");
  }
  if (const auto* mr = std::get_if<MinimalReduction>(&objective_)) {
    if (mr->alpha.size() != net_.edge_count()) throw std::invalid_argument("alpha does not match the edges");
    if ((mr->alpha.array() < 0.0).any()) throw std::invalid_argument("alpha must be nonnegative");
  }
  FeasibilityResult fr = feasible_balanced_flow(net_, available_, max_inflow_);
  if (!fr.feasible) {
    throw std::invalid_argument("maximal inflow cannot be carried by the available capacities (deficit " +
                                std::to_string(fr.deficit) + ")");
  }
}

Vector<double> node_excess(const FlowNetwork& net, const CapacityVector& c, const InflowVector& max_inflow) {
  Vector<double> excess = node_injection(net, max_inflow);
  for (const Edge& e : net.edges()) {
    excess[e.head.index()] += c[e.id];
    excess[e.tail.index()] -= c[e.id];
  }
  for (NodeId d : net.destinations()) excess[d.index()] = 0.0;
  return excess;
}

double worst_node_excess(const FlowNetwork& net, const CapacityVector& c, const InflowVector& max_inflow) {
  const Vector<double> excess = node_excess(net, c, max_inflow);
  double worst = -std::numeric_limits<double>::infinity();
  for (NodeId v : net.nodes()) {
    if (!net.is_destination(v)) worst = std::max(worst, excess[v.index()]);
  }
  return worst;
}

bool in_safe_capacity_set(const FlowNetwork& net, const CapacityVector& c, const CapacityVector& available,
                          const InflowVector& max_inflow, double tolerance) {
  if ((c.array() < -tolerance).any() || ((c - available).array() > tolerance).any()) return false;
  const Vector<double> excess = node_excess(net, c, max_inflow);
  return (excess.array() <= tolerance).all();
}

namespace {

// One row per non-destination node, in label order:
//   in-capacity - out-capacity - s_coeff * s <= -lambda_bar_v
LinearProgram<double> safety_rows(const AllocationProblem& p, bool with_epigraph) {
  const FlowNetwork& net = p.network();
  const Eigen::Index m = net.edge_count();
  const Eigen::Index n = with_epigraph ? m + 1 : m;

  auto lp = LinearProgram<double>::nonnegative(n);
  lp.upper.head(m) = p.available();
  if (with_epigraph) {
    lp.lower[m] = -std::numeric_limits<double>::infinity();
  }
  const Vector<double> inject = node_injection(net, p.max_inflow());
  for (NodeId v : net.nodes()) {
    if (net.is_destination(v)) continue;
    Vector<double> row = Vector<double>::Zero(n);
    for (EdgeId e : net.in_edges(v)) row[e] += 1.0;
    for (EdgeId e : net.out_edges(v)) row[e] -= 1.0;
    if (with_epigraph) row[m] = -1.0;
    lp.add_row(row, -inject[v.index()]);
  }
  return lp;
}

AllocationResult finish(const AllocationProblem& p, const Vector<double>& x, int pivots) {
  AllocationResult r;
  r.capacities = x.head(p.network().edge_count()).cwiseMax(0.0).cwiseMin(p.available());
  r.node_excess = node_excess(p.network(), r.capacities, p.max_inflow());
  r.pivots = pivots;
  return r;
}

void require_optimal(const LpSolution<double>& sol, const char* what) {
  if (sol.status != LpStatus::Optimal) {
    throw AllocationError(std::string(what) + " LP is " + to_string(sol.status));
  }
}

}  // namespace

AllocationResult solve_minimal_reduction(const AllocationProblem& problem) {
  const auto* mr = std::get_if<MinimalReduction>(&problem.objective());
  if (!mr) throw std::invalid_argument("problem does not carry a minimal-reduction objective");

  LinearProgram<double> lp = safety_rows(problem, false);
  lp.sense = Sense::Maximize;
  lp.objective = mr->alpha;  // alpha^T (C_bar - C) is minimal where alpha^T C is maximal
  const LpSolution<double> sol = solve_lp(lp, kLpTolerance);
  require_optimal(sol, "minimal-reduction");

  AllocationResult r = finish(problem, sol.x, sol.pivots);
  r.objective_value = mr->alpha.dot(problem.available() - r.capacities);
  return r;
}

AllocationResult solve_robust_safety(const AllocationProblem& problem) {
  if (!std::holds_alternative<RobustSafety>(problem.objective())) {
    throw std::invalid_argument("problem does not carry a robust-safety objective");
  }
  const Eigen::Index m = problem.network().edge_count();
  LinearProgram<double> lp = safety_rows(problem, true);
  lp.objective = Vector<double>::Zero(m + 1);
  lp.objective[m] = 1.0;
  const LpSolution<double> sol = solve_lp(lp, kLpTolerance);
  require_optimal(sol, "robust-safety");

  AllocationResult r = finish(problem, sol.x, sol.pivots);
  r.objective_value = sol.x[m];
  return r;
}

AllocationResult solve_allocation(const AllocationProblem& problem) {
  if (std::holds_alternative<MinimalReduction>(problem.objective())) return solve_minimal_reduction(problem);
  return solve_robust_safety(problem);
}

VerificationReport verify_allocation(const FlowNetwork& net, const CapacityVector& c,
                                     const InflowVector& max_inflow, double budget, int trials,
                                     std::uint64_t seed) {
  if (budget < 0.0) throw std::invalid_argument("delta budget must be nonnegative");
  VerificationReport report;
  report.trials = trials;
  report.budget = budget;
  report.margin = -worst_node_excess(net, c, max_inflow);
  report.guaranteed = budget <= report.margin + kLpTolerance;

  const RoutingPolicy policies[] = {RoutingPolicy::proportional(), RoutingPolicy::priority()};
  const Eigen::Index m = net.edge_count();
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::exponential_distribution<double> spread(1.0);

  for (int trial = 0; trial < trials; ++trial) {
    InflowVector lambda = max_inflow;
    CapacityVector delta = CapacityVector::Zero(m);
    switch (trial % 3) {
      case 0: {
        const EdgeId e = (trial / 3) % m;
        delta[e] = std::min(budget, c[e]);
        break;
      }
      default: {
        if (trial % 3 == 2) {
          for (Eigen::Index k = 0; k < lambda.size(); ++k) lambda[k] *= unit(rng);
        }
        Vector<double> weights(m);
        for (Eigen::Index e = 0; e < m; ++e) weights[e] = spread(rng);
        const double total = budget * unit(rng);
        if (weights.sum() > 0.0) delta = (weights * (total / weights.sum())).cwiseMin(c);
        break;
      }
    }

    const CapacityVector reduced = (c - delta).cwiseMax(0.0);
    const bool certificate = check_lemma1(net, reduced, max_inflow);
    if (!certificate) {
      report.violations.push_back({trial, "", lambda, delta, Verdict::SafelyTransferring, false});
    }
    for (const RoutingPolicy& policy : policies) {
      SimulationOptions opts;
      opts.recording = Recording::EventsOnly;
      const Verdict verdict = simulate(net, policy, lambda, reduced, opts).verdict;
      if (verdict != Verdict::SafelyTransferring) {
        report.violations.push_back({trial, policy.name(), lambda, delta, verdict, certificate});
      }
    }
  }
  return report;
}

}  // namespace lrflow
