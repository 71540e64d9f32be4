#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "lrflow/analysis.hpp"
#include "lrflow/cascade.hpp"
#include "lrflow/maxflow.hpp"
#include "support/generators.hpp"
#include "support/oracles.hpp"

using namespace lrflow;

namespace {

FlowNetwork diamond() { return build_network(4, {{1, 2}, {1, 3}, {2, 4}, {3, 4}}); }

}  // namespace

TEST_CASE("max-flow on a textbook network") {
  MaxFlow mf(4);
  const int a = mf.add_arc(0, 1, 3);
  mf.add_arc(0, 2, 2);
  mf.add_arc(1, 2, 1);
  mf.add_arc(1, 3, 2);
  mf.add_arc(2, 3, 3);
  CHECK(mf.solve(0, 3) == doctest::Approx(5));
  CHECK(mf.flow(a) == doctest::Approx(3));
}

TEST_CASE("feasibility on the diamond") {
  const FlowNetwork net = diamond();
  const CapacityVector c = CapacityVector::Ones(4);
  const FeasibilityResult ok = feasible_balanced_flow(net, c, InflowVector::Constant(1, 2.0));
  REQUIRE(ok.feasible);
  CHECK(ok.witness->isApprox(FlowVector::Ones(4)));
  const FeasibilityResult too_much = feasible_balanced_flow(net, c, InflowVector::Constant(1, 2.5));
  CHECK_FALSE(too_much.feasible);
  CHECK(too_much.deficit == doctest::Approx(0.5));
  CHECK_FALSE(too_much.witness.has_value());
  CHECK(in_lambda_set(net, c, InflowVector::Zero(1)));
}

TEST_CASE("property: feasibility agrees with exhaustive enumeration on half-unit grids") {
  testing::Rng rng(8);
  for (int trial = 0; trial < 150; ++trial) {
    const auto inst = testing::random_grid_instance(rng);
    const bool expected = testing::brute_force_balanced_flow_exists(inst.net, inst.c, inst.lambda);
    CHECK(feasible_balanced_flow(inst.net, inst.c, inst.lambda).feasible == expected);
  }
}

TEST_CASE("property: witnesses are balanced and satisfy cut balance") {
  testing::Rng rng(31);
  int checked = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const FlowNetwork net = testing::random_network(rng);
    const CapacityVector c = testing::random_capacities(rng, net);
    const InflowVector lambda = testing::random_inflow(rng, net, 0.1, 1.0);
    const FeasibilityResult fr = feasible_balanced_flow(net, c, lambda);
    if (!fr.feasible) continue;
    ++checked;
    const FlowVector& f = *fr.witness;
    CHECK((f.array() >= 0.0).all());
    CHECK((f.array() <= c.array()).all());
    CHECK(is_balanced_feasible(net, lambda, c, f));

    // For any set U of non-destinations: inflow over the cut plus injection
    // equals outflow over the cut.
    std::vector<NodeId> u;
    for (NodeId v : net.nodes()) {
      if (!net.is_destination(v) && testing::uniform(rng, 0, 1) < 0.5) u.push_back(v);
    }
    const CutSets cut = cut_edges(net, u);
    const Vector<double> inj = node_injection(net, lambda);
    double lhs = 0.0;
    for (NodeId v : u) lhs += inj[v.index()];
    for (EdgeId e : cut.incoming) lhs += f[e];
    double rhs = 0.0;
    for (EdgeId e : cut.outgoing) rhs += f[e];
    CHECK(lhs == doctest::Approx(rhs).epsilon(1e-9));
  }
  CHECK(checked > 20);
}

TEST_CASE("property: shrinking capacities shrinks the feasible inflow set") {
  testing::Rng rng(41);
  for (int trial = 0; trial < 60; ++trial) {
    const FlowNetwork net = testing::random_network(rng);
    const CapacityVector c = testing::random_capacities(rng, net);
    CapacityVector reduced = c;
    for (Eigen::Index e = 0; e < c.size(); ++e) reduced[e] *= testing::uniform(rng, 0.0, 1.0);
    std::vector<InflowVector> samples;
    for (int k = 0; k < 20; ++k) samples.push_back(testing::random_inflow(rng, net, 0.0, 2.0));
    const FeasibleSetReport report = check_feasible_set_monotone(net, c, reduced, samples);
    CHECK(report.samples == 20);
    CHECK(report.passed());
    CHECK_THROWS_AS(check_feasible_set_monotone(net, reduced, c + CapacityVector::Ones(c.size()), samples),
                    std::invalid_argument);
  }
}

TEST_CASE("sufficient condition for safe transfer") {
  const FlowNetwork net = diamond();
  CHECK(check_lemma1(net, CapacityVector::Ones(4), InflowVector::Constant(1, 2.0)));
  CapacityVector c(4);
  c << 2, 1, 1, 1;
  CHECK_FALSE(check_lemma1(net, c, InflowVector::Constant(1, 2.0)));
  CHECK_FALSE(check_lemma1(net, CapacityVector::Ones(4), InflowVector::Constant(1, 2.5)));
}

TEST_CASE("topology classification") {
  CHECK_FALSE(check_theorem2_topology(diamond()));
  CHECK(has_branching_into_intermediate(diamond(), NodeId{1}));
  CHECK_FALSE(has_branching_into_intermediate(diamond(), NodeId{2}));
  // Branching into destinations only.
  CHECK(check_theorem2_topology(build_network(4, {{1, 2}, {1, 2}, {2, 3}, {2, 4}})));
}

TEST_CASE("construction picks an intermediate neighbour even when a destination has a lower label") {
  // 1 -> 2 (destination), 1 -> 3 -> 4
  const FlowNetwork net = build_network(4, {{1, 2}, {1, 3}, {3, 4}});
  const Theorem1Instance inst = construct_theorem1_instance(net, NodeId{1}, InflowVector::Constant(1, 2.0));
  CHECK(inst.w == NodeId{3});
  CHECK(inst.base == Eigen::Vector3d(1, 1, 1));
  CHECK(inst.raised == Eigen::Vector3d(1, 2, 1));
  const auto p = RoutingPolicy::proportional();
  CHECK(simulate(net, p, inst.lambda, inst.base).verdict == Verdict::SafelyTransferring);
  CHECK(simulate(net, p, inst.lambda, inst.raised).verdict == Verdict::NonTransferring);
}

TEST_CASE("construction rejects nodes without the required branching") {
  CHECK_THROWS_AS(construct_theorem1_instance(diamond(), NodeId{2}, InflowVector::Constant(1, 2.0)),
                  std::invalid_argument);
  CHECK_THROWS_AS(construct_theorem1_instance(diamond(), NodeId{1}, InflowVector::Zero(1)), std::invalid_argument);
}

TEST_CASE("safe reduction is a tight balanced flow") {
  const FlowNetwork net = diamond();
  const CapacityVector c = CapacityVector::Constant(4, 2.0);
  const InflowVector lambda = InflowVector::Constant(1, 3.0);
  const CapacityVector low = safe_capacity_reduction(net, c, lambda);
  CHECK((low.array() <= c.array()).all());
  CHECK(check_lemma1(net, low, lambda));
  CHECK(simulate(net, RoutingPolicy::priority(), lambda, low).verdict == Verdict::SafelyTransferring);
  CHECK_THROWS_AS(safe_capacity_reduction(net, c, InflowVector::Constant(1, 5.0)), std::invalid_argument);
}

TEST_CASE("resilience search modes on the diamond") {
  const FlowNetwork net = diamond();
  const CapacityVector c = CapacityVector::Constant(4, 2.0);
  const InflowVector lambda = InflowVector::Constant(1, 2.0);
  const auto p = RoutingPolicy::proportional();

  // No single edge can break it: the other branch always absorbs the load.
  const ResilienceResult single = resilience_search(net, p, lambda, c, 0.25, ResilienceMode::SingleEdge);
  CHECK_FALSE(single.found);
  CHECK(std::isinf(single.value));

  const ResilienceResult grid = resilience_search(net, p, lambda, c, 0.25, ResilienceMode::FullGrid);
  REQUIRE(grid.found);
  CHECK(grid.exact);
  CHECK(grid.value == doctest::Approx(1.25));
  CHECK(grid.witness_delta.sum() == doctest::Approx(grid.value));
  CHECK(simulate(net, p, lambda, c - grid.witness_delta).verdict == Verdict::NonTransferring);

  const ResilienceResult node = resilience_search(net, p, lambda, c, 0.25, ResilienceMode::PerNode);
  if (node.found) CHECK(node.value >= grid.value - 1e-12);

  CapacityVector broken(4);
  broken << 2, 1, 1, 1;
  const ResilienceResult zero = resilience_search(net, p, lambda, broken, 0.25, ResilienceMode::SingleEdge);
  CHECK(zero.found);
  CHECK(zero.value == 0.0);
  CHECK(zero.witness_delta.isZero());

  CHECK(resilience_mode_from("per_node") == ResilienceMode::PerNode);
  CHECK(to_token(ResilienceMode::FullGrid) == "full_grid");
  CHECK_THROWS_AS(resilience_mode_from("exhaustive"), std::invalid_argument);
}

TEST_CASE("full grid refuses oversized searches") {
  const FlowNetwork net = diamond();
  const CapacityVector c = CapacityVector::Constant(4, 2.0);
  CHECK_THROWS(resilience_search(net, RoutingPolicy::proportional(), InflowVector::Constant(1, 2.0), c, 0.01,
                                 ResilienceMode::FullGrid));
}
