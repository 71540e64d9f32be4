#include "lrflow/routing.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace lrflow {

RoutingPolicy RoutingPolicy::proportional() {
  return RoutingPolicy("proportional", [](const Vector<double>& c, double mu) {
    return route_proportional(c, mu);
  });
}

RoutingPolicy RoutingPolicy::priority() {
  return RoutingPolicy("priority", [](const Vector<double>& c, double mu) {
    return route_priority(c, mu);
  });
}

std::vector<std::string> policy_names() { return {"proportional", "priority"}; }

RoutingPolicy policy_by_name(std::string_view name) {
  if (name == "proportional") return RoutingPolicy::proportional();
  if (name == "priority") return RoutingPolicy::priority();
  std::string valid;
  for (const auto& n : policy_names()) valid += (valid.empty() ? "" : ", ") + n;
  throw std::invalid_argument("unknown routing policy '" + std::string(name) + "' (valid: " + valid + ")");
}

std::string to_string(AxiomKind kind) {
  switch (kind) {
    case AxiomKind::Conservation: return "conservation";
    case AxiomKind::CapacityRespect: return "capacity-respect";
    case AxiomKind::Negativity: return "negative-outflow";
  }
  return "unknown";
}

AxiomReport check_policy_axioms(const RoutingPolicy& policy, int samples, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> degree(1, 6);
  std::uniform_real_distribution<double> unit(0.0, 1.0);

  AxiomReport report{policy.name(), samples, {}};
  for (int s = 0; s < samples; ++s) {
    Vector<double> c(degree(rng));
    for (Eigen::Index k = 0; k < c.size(); ++k) c[k] = unit(rng) < 0.2 ? 0.0 : 5.0 * unit(rng);
    if (c.sum() <= 0.0) c[0] = 1.0;
    const double total = c.sum();
    // One draw in ten sits exactly on the capacity boundary.
    const double mu = unit(rng) < 0.1 ? total : 1.5 * total * unit(rng);

    Vector<double> routed = policy(c, mu);
    auto record = [&](AxiomKind kind) { report.violations.push_back({kind, c, mu, routed}); };
    if (routed.size() != c.size() || std::abs(routed.sum() - mu) > kRouteTolerance) {
      record(AxiomKind::Conservation);
      continue;
    }
    if ((routed.array() < 0.0).any()) {
      record(AxiomKind::Negativity);
      continue;
    }
    if (mu <= total && ((routed - c).array() > kRouteTolerance).any()) {
      record(AxiomKind::CapacityRespect);
    }
  }
  return report;
}

std::vector<MonotonicityViolation> capacity_monotone_violations(const RoutingPolicy& policy,
                                                                const Vector<double>& capacities,
                                                                const Vector<double>& raised,
                                                                double inflow) {
  std::vector<MonotonicityViolation> out;
  if (raised == capacities) return out;
  Vector<double> before = policy(capacities, inflow);
  Vector<double> after = policy(raised, inflow);
  for (Eigen::Index k = 0; k < capacities.size(); ++k) {
    if (raised[k] != capacities[k] || capacities[k] <= 0.0) continue;
    if (!(after[k] < before[k] - kStrictMargin)) {
      out.push_back({capacities, raised, inflow, k, before[k], after[k]});
    }
  }
  return out;
}

MonotonicityReport check_capacity_monotone(const RoutingPolicy& policy, int node_degree, int samples,
                                           std::uint64_t seed) {
  if (node_degree < 2) throw std::invalid_argument("capacity monotonicity needs node_degree >= 2");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<int> raised_count(1, node_degree - 1);

  MonotonicityReport report{policy.name(), samples, {}};
  std::vector<Eigen::Index> order(static_cast<std::size_t>(node_degree));
  for (int s = 0; s < samples; ++s) {
    Vector<double> c(node_degree);
    for (Eigen::Index k = 0; k < c.size(); ++k) c[k] = 0.1 + 4.9 * unit(rng);
    for (std::size_t k = 0; k < order.size(); ++k) order[k] = static_cast<Eigen::Index>(k);
    std::shuffle(order.begin(), order.end(), rng);

    Vector<double> raised = c;
    const int bumps = raised_count(rng);
    for (int k = 0; k < bumps; ++k) raised[order[static_cast<std::size_t>(k)]] += 0.1 + 2.9 * unit(rng);
    const double mu = 0.01 + 2.0 * c.sum() * unit(rng);

    auto found = capacity_monotone_violations(policy, c, raised, mu);
    report.violations.insert(report.violations.end(), found.begin(), found.end());
  }
  return report;
}

}  // namespace lrflow
