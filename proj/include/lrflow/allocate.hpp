#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "lrflow/cascade.hpp"
#include "lrflow/netcore.hpp"
#include "lrflow/simplex.hpp"

namespace lrflow {

/// Feasibility and optimality tolerance of the allocation LPs.
inline constexpr double kLpTolerance = 1e-8;

/// Cost alpha^T (C_bar - C) of cutting capacity.
struct MinimalReduction {
  CapacityVector alpha;
};

/// Maximize the capacity loss that can be absorbed before the safety
/// certificate breaks, i.e. minimize the worst node excess.
struct RobustSafety {};

using AllocationObjective = std::variant<MinimalReduction, RobustSafety>;

class AllocationError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Available capacities C_bar, the largest inflow lambda_bar that must be
/// carried, and the cost to optimize. Construction rejects lambda_bar that
/// admits no balanced flow on C_bar and negative alpha.
class AllocationProblem {
 public:
  AllocationProblem(FlowNetwork net, CapacityVector available, InflowVector max_inflow,
                    AllocationObjective objective);

  const FlowNetwork& network() const { return net_; }
  const CapacityVector& available() const { return available_; }
  const InflowVector& max_inflow() const { return max_inflow_; }
  const AllocationObjective& objective() const { return objective_; }

 private:
  FlowNetwork net_;
  CapacityVector available_;
  InflowVector max_inflow_;
  AllocationObjective objective_;
};

struct AllocationResult {
  CapacityVector capacities;
  double objective_value = 0.0;
  /// lambda_bar_v + in-capacity - out-capacity for non-destinations, 0 at
  /// destinations. Nonpositive everywhere for a certified allocation.
  Vector<double> node_excess;
  int pivots = 0;
};

/// Per-node excess lambda_bar_v + 1^T C_in - 1^T C_out (0 at destinations).
Vector<double> node_excess(const FlowNetwork& net, const CapacityVector& c, const InflowVector& max_inflow);

/// Largest node excess over non-destinations; its negation is the capacity
/// loss the allocation absorbs while staying certified.
double worst_node_excess(const FlowNetwork& net, const CapacityVector& c, const InflowVector& max_inflow);

/// 0 <= C <= C_bar, origins cover lambda_bar, intermediates pass on their
/// in-capacity, each within tolerance.
bool in_safe_capacity_set(const FlowNetwork& net, const CapacityVector& c, const CapacityVector& available,
                          const InflowVector& max_inflow, double tolerance = kLpTolerance);

AllocationResult solve_minimal_reduction(const AllocationProblem& problem);
AllocationResult solve_robust_safety(const AllocationProblem& problem);
AllocationResult solve_allocation(const AllocationProblem& problem);

struct VerificationViolation {
  int trial = 0;
  std::string policy;  // empty when only the certificate failed
  InflowVector lambda;
  CapacityVector delta;
  Verdict verdict = Verdict::SafelyTransferring;
  bool certificate_holds = true;
};

struct VerificationReport {
  int trials = 0;
  double budget = 0.0;
  double margin = 0.0;      // -worst_node_excess(C_opt)
  bool guaranteed = false;  // budget <= margin
  std::vector<VerificationViolation> violations;

  bool passed() const { return violations.empty(); }
};

/// Draws inflows in [0, lambda_bar] and reductions delta in [0, C] with
/// 1^T delta <= budget, simulates both reference policies and rechecks the
/// safety certificate for lambda_bar. A third of the trials put the whole
/// budget on a single edge at full inflow. Any trial that is not safely
/// transferring, or loses the certificate, is reported.
VerificationReport verify_allocation(const FlowNetwork& net, const CapacityVector& c,
                                     const InflowVector& max_inflow, double budget, int trials,
                                     std::uint64_t seed);

}  // namespace lrflow
