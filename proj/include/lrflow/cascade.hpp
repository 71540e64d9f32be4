#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "lrflow/netcore.hpp"
#include "lrflow/routing.hpp"

namespace lrflow {

/// Relative slack on the overload test, so a routed flow equal to the
/// capacity up to rounding does not trip a failure.
inline constexpr double kOverloadGuard = 1e-12;

enum class Verdict { SafelyTransferring, Transferring, NonTransferring };
enum class FailureCause { Overload, DeadDownstream };

/// Uppercase tokens: SAFE, TRANSFERRING, NON_TRANSFERRING.
std::string to_token(Verdict v);
/// "overload" / "dead-downstream".
std::string to_token(FailureCause c);

inline bool is_transferring(Verdict v) { return v != Verdict::NonTransferring; }

struct CascadeState {
  int t = 0;
  CapacityVector capacities;
  FlowVector flows;
  Vector<double> node_inflows;  // mu(t), indexed by NodeId::index()

  bool same_point(const CascadeState& other) const {
    return capacities == other.capacities && flows == other.flows;
  }
};

struct FailureEvent {
  int t = 0;  // first time at which the edge reads (0, 0)
  EdgeId edge = 0;
  FailureCause cause = FailureCause::Overload;
};

enum class Recording { Full, EventsOnly };

struct SimulationOptions {
  std::optional<int> horizon;  // empty: auto_horizon(net)
  Recording recording = Recording::Full;
};

struct Trajectory {
  std::vector<CascadeState> states;  // 0..limit.t when recording is Full
  std::vector<FailureEvent> events;
  Verdict verdict = Verdict::NonTransferring;
  CascadeState limit;
};

class CascadeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Zero flow, capacities c0, and the inflow each node sees at t = 0.
CascadeState initial_state(const FlowNetwork& net, const InflowVector& lambda, const CapacityVector& c0);

/// Per-node inflow: lambda at origins, the incoming flow sum elsewhere.
Vector<double> node_inflows(const FlowNetwork& net, const InflowVector& lambda, const FlowVector& flows);

/// One synchronous update from t to t + 1. An edge drops to (0, 0) when its
/// routed flow overloads it, or when it carries flow into a non-destination
/// whose outgoing capacity is exhausted. New failures are appended to
/// `events` if given.
CascadeState step(const FlowNetwork& net, const RoutingPolicy& policy, const InflowVector& lambda,
                  const CascadeState& state, std::vector<FailureEvent>* events = nullptr);

/// (|E| + 1) * (l_max + 1): failures happen at no more than |E| distinct
/// times and flows settle within l_max + 1 steps of the last one.
int auto_horizon(const FlowNetwork& net);

/// Iterates step() from (c0, 0) until (C, f) repeats exactly. Throws
/// CascadeError if the horizon runs out first, and NetworkError on
/// malformed inputs.
Trajectory simulate(const FlowNetwork& net, const RoutingPolicy& policy, const InflowVector& lambda,
                    const CapacityVector& c0, const SimulationOptions& options = {});

/// True when f <= C and every non-destination node balances injected plus
/// incoming flow against outgoing flow.
bool is_balanced_feasible(const FlowNetwork& net, const InflowVector& lambda, const CapacityVector& c,
                          const FlowVector& f, double tolerance = kRouteTolerance);

Verdict classify(const FlowNetwork& net, const InflowVector& lambda, const CapacityVector& c_star,
                 const FlowVector& f_star, const CapacityVector& c0);

}  // namespace lrflow
