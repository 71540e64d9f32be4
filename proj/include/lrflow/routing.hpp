#pragma once

#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <Eigen/Core>

#include "lrflow/netcore.hpp"

namespace lrflow {

/// Absolute tolerance on flow conservation checks.
inline constexpr double kRouteTolerance = 1e-9;
/// Margin required before a "strictly smaller" flow comparison counts.
inline constexpr double kStrictMargin = 1e-12;

/// Raised when a node must route positive inflow over zero total capacity.
class RoutingUndefined : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Splits `inflow` over the outgoing edges in proportion to their
/// capacities. Under overload every edge receives more than its capacity by
/// the same factor.
template <typename Derived>
Vector<typename Derived::Scalar> route_proportional(const Eigen::MatrixBase<Derived>& capacities,
                                                    typename Derived::Scalar inflow) {
  using Scalar = typename Derived::Scalar;
  const Scalar total = capacities.sum();
  if (total <= Scalar(0)) {
    if (inflow > Scalar(0)) throw RoutingUndefined("proportional routing over zero capacity");
    return Vector<Scalar>::Zero(capacities.size());
  }
  return capacities * (inflow / total);
}

/// Fills outgoing edges in ascending edge order up to capacity. Whatever does
/// not fit is put on the last edge with positive capacity.
template <typename Derived>
Vector<typename Derived::Scalar> route_priority(const Eigen::MatrixBase<Derived>& capacities,
                                                typename Derived::Scalar inflow) {
  using Scalar = typename Derived::Scalar;
  Vector<Scalar> out = Vector<Scalar>::Zero(capacities.size());
  if (inflow <= Scalar(0)) return out;
  Eigen::Index last_positive = -1;
  Scalar remaining = inflow;
  for (Eigen::Index k = 0; k < capacities.size(); ++k) {
    if (capacities[k] <= Scalar(0)) continue;
    last_positive = k;
    const Scalar take = remaining < capacities[k] ? remaining : capacities[k];
    out[k] = take;
    remaining -= take;
  }
  if (last_positive < 0) throw RoutingUndefined("priority routing over zero capacity");
  out[last_positive] += remaining;
  return out;
}

/// A named local routing rule: a pure function of the outgoing capacities of
/// one node and that node's inflow.
class RoutingPolicy {
 public:
  using Function = std::function<Vector<double>(const Vector<double>&, double)>;

  RoutingPolicy(std::string name, Function route) : name_(std::move(name)), route_(std::move(route)) {}

  static RoutingPolicy proportional();
  static RoutingPolicy priority();

  const std::string& name() const { return name_; }
  Vector<double> operator()(const Vector<double>& capacities, double inflow) const {
    return route_(capacities, inflow);
  }

 private:
  std::string name_;
  Function route_;
};

/// "proportional" or "priority". Throws std::invalid_argument listing the
/// valid names otherwise.
RoutingPolicy policy_by_name(std::string_view name);
std::vector<std::string> policy_names();

enum class AxiomKind { Conservation, CapacityRespect, Negativity };

struct AxiomViolation {
  AxiomKind kind;
  Vector<double> capacities;
  double inflow = 0.0;
  Vector<double> routed;
};

struct AxiomReport {
  std::string policy;
  int samples = 0;
  std::vector<AxiomViolation> violations;

  bool passed() const { return violations.empty(); }
};

/// Random (capacities, inflow) draws checked against conservation and
/// capacity respect. Failures are collected, never thrown.
AxiomReport check_policy_axioms(const RoutingPolicy& policy, int samples, std::uint64_t seed);

struct MonotonicityViolation {
  Vector<double> capacities;
  Vector<double> raised;
  double inflow = 0.0;
  Eigen::Index position = 0;  // local index of the unchanged edge
  double before = 0.0;
  double after = 0.0;
};

struct MonotonicityReport {
  std::string policy;
  int samples = 0;
  std::vector<MonotonicityViolation> violations;

  bool passed() const { return violations.empty(); }
};

/// Unchanged positive-capacity edges whose flow did not strictly drop when
/// `raised` (>= capacities, != capacities) replaces `capacities`. An empty
/// result for raised == capacities is vacuous.
std::vector<MonotonicityViolation> capacity_monotone_violations(const RoutingPolicy& policy,
                                                                const Vector<double>& capacities,
                                                                const Vector<double>& raised,
                                                                double inflow);

/// Samples inflow > 0, positive capacities and a raise on a nonempty proper
/// subset of the edges, and collects every violation. Throws
/// std::invalid_argument when node_degree < 2.
MonotonicityReport check_capacity_monotone(const RoutingPolicy& policy, int node_degree, int samples,
                                           std::uint64_t seed);

std::string to_string(AxiomKind kind);

}  // namespace lrflow
