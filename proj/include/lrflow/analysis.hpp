#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "lrflow/cascade.hpp"
#include "lrflow/netcore.hpp"
#include "lrflow/routing.hpp"

namespace lrflow {

/// Augmenting paths below this bottleneck are dropped by the max-flow.
inline constexpr double kAugmentCutoff = 1e-9;

struct FeasibilityResult {
  bool feasible = false;
  std::optional<FlowVector> witness;  // present iff feasible
  double deficit = 0.0;               // inflow that cannot be routed
};

/// Decides whether a balanced flow f <= C exists for lambda by max-flow from
/// a super source (arcs of capacity lambda_v into each origin) to a super
/// sink fed by every destination. The witness is the max-flow restricted to
/// the network edges.
FeasibilityResult feasible_balanced_flow(const FlowNetwork& net, const CapacityVector& c,
                                         const InflowVector& lambda);

/// Membership of lambda in the set of inflows that admit a balanced flow.
bool in_lambda_set(const FlowNetwork& net, const CapacityVector& c, const InflowVector& lambda);

struct FeasibleSetReport {
  int samples = 0;
  std::vector<InflowVector> violations;  // feasible on the reduced capacities only

  bool passed() const { return violations.empty(); }
};

/// Checks that every sampled inflow feasible under `reduced` is feasible
/// under `c`. Throws std::invalid_argument unless reduced <= c.
FeasibleSetReport check_feasible_set_monotone(const FlowNetwork& net, const CapacityVector& c,
                                              const CapacityVector& reduced,
                                              std::span<const InflowVector> samples);

enum class ResilienceMode { SingleEdge, PerNode, FullGrid };

std::string to_token(ResilienceMode mode);
/// "single_edge", "per_node" or "full_grid"; throws std::invalid_argument.
ResilienceMode resilience_mode_from(std::string_view token);

/// Exhaustive search limits for ResilienceMode::FullGrid.
inline constexpr Eigen::Index kFullGridMaxEdges = 6;
inline constexpr int kFullGridMaxUnits = 64;

struct ResilienceResult {
  bool found = false;
  double value = 0.0;  // 1^T delta of the witness; +inf when nothing was found
  CapacityVector witness_delta;
  bool exact = false;  // exhaustive at the given grid resolution
  long candidates = 0;
};

/// Searches capacity reductions 0 <= delta <= C that make the system
/// non-transferring and keeps the cheapest (ties: lexicographically smallest
/// delta). Non-transferring inputs report 0 with delta = 0.
///
/// - SingleEdge sweeps each edge alone in multiples of grid_step.
/// - PerNode scales all outgoing capacities of one node by a common factor,
///   stepping the total reduction by grid_step.
/// - FullGrid enumerates every per-edge multiple of grid_step in order of
///   increasing total and stops at the first total that works. Limited to
///   kFullGridMaxEdges edges and kFullGridMaxUnits steps per edge.
///
/// The reported value is the grid point found, an upper bound on the
/// infimum since overload is a strict inequality.
ResilienceResult resilience_search(const FlowNetwork& net, const RoutingPolicy& policy,
                                   const InflowVector& lambda, const CapacityVector& c, double grid_step,
                                   ResilienceMode mode);

/// Sufficient condition for safe transfer under every local policy: each
/// origin's outgoing capacity covers its inflow and each intermediate's
/// outgoing capacity covers its incoming capacity.
bool check_lemma1(const FlowNetwork& net, const CapacityVector& c, const InflowVector& lambda,
                  double tolerance = kRouteTolerance);

struct Theorem1Instance {
  CapacityVector base;    // tight capacities, safely transferring
  CapacityVector raised;  // base plus `bump` on the v -> w edges
  InflowVector lambda;
  NodeId w;
};

/// Nodes with outgoing links to at least two distinct nodes, one of them an
/// intermediate.
bool has_branching_into_intermediate(const FlowNetwork& net, NodeId v);

/// Builds tight capacities (origin out-capacity equals its inflow,
/// intermediate out-capacity equals its in-capacity, split evenly over
/// parallel and sibling out-edges) and a raised copy where the edges from v
/// to w, the smallest intermediate out-neighbour of v, gain `bump`.
/// Throws std::invalid_argument when v fails the branching hypothesis, when
/// an origin inflow is not positive, or when bump <= 0.
Theorem1Instance construct_theorem1_instance(const FlowNetwork& net, NodeId v, const InflowVector& lambda,
                                             double bump = 1.0);

/// True when no node branches into an intermediate; on single-destination
/// networks these are the directed trees rooted at the destination.
bool check_theorem2_topology(const FlowNetwork& net);

/// Capacities equal to a feasible balanced flow for lambda. Under them every
/// inflow in [0, lambda] is transferred safely by any local policy.
/// Throws std::invalid_argument when lambda admits no balanced flow.
CapacityVector safe_capacity_reduction(const FlowNetwork& net, const CapacityVector& c,
                                       const InflowVector& lambda);

}  // namespace lrflow
