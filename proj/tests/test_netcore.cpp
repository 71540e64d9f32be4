#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lrflow/netcore.hpp"
#include "support/generators.hpp"

using namespace lrflow;

TEST_CASE("diamond roles and adjacency") {
  const FlowNetwork net = build_network(4, {{1, 2}, {1, 3}, {2, 4}, {3, 4}});
  CHECK(net.node_count() == 4);
  CHECK(net.edge_count() == 4);
  CHECK(net.role(NodeId{1}) == NodeRole::Origin);
  CHECK(net.role(NodeId{2}) == NodeRole::Intermediate);
  CHECK(net.role(NodeId{4}) == NodeRole::Destination);
  CHECK(net.origins() == std::vector<NodeId>{NodeId{1}});
  CHECK(net.destinations() == std::vector<NodeId>{NodeId{4}});
  CHECK(net.out_edges(NodeId{1}).size() == 2);
  CHECK(net.in_edges(NodeId{4}).size() == 2);
  CHECK(net.out_neighbors(NodeId{1}) == std::vector<NodeId>{NodeId{2}, NodeId{3}});
  CHECK_FALSE(net.was_relabeled());
  CHECK(longest_path_length(net) == 2);
}

TEST_CASE("parallel edges are kept and counted once as neighbours") {
  const FlowNetwork net = build_network(3, {{1, 2}, {1, 2}, {2, 3}});
  CHECK(net.edge_count() == 3);
  CHECK(net.out_edges(NodeId{1}).size() == 2);
  CHECK(net.out_neighbors(NodeId{1}).size() == 1);
}

TEST_CASE("non-monotone input is relabelled and maps back") {
  // 3 -> 1 -> 2 and 3 -> 2
  const FlowNetwork net = build_network(3, {{3, 1}, {1, 2}, {3, 2}});
  CHECK(net.was_relabeled());
  for (const Edge& e : net.edges()) CHECK(e.tail < e.head);
  CHECK(net.original_label(net.relabeled(NodeId{3})) == NodeId{3});
  CHECK(net.relabeled(NodeId{3}) == NodeId{1});
  CHECK(net.is_origin(net.relabeled(NodeId{3})));
  CHECK(net.is_destination(net.relabeled(NodeId{2})));
  // Edge ids follow input order.
  CHECK(net.original_label(net.edge(0).tail) == NodeId{3});
  CHECK(net.original_label(net.edge(0).head) == NodeId{1});
}

TEST_CASE("invalid networks are rejected with a reason") {
  CHECK_THROWS_WITH_AS(build_network(3, {{1, 2}, {2, 3}, {3, 1}}), doctest::Contains("cycle"), NetworkError);
  CHECK_THROWS_WITH_AS(build_network(3, {{1, 1}, {1, 2}}), doctest::Contains("self-loop"), NetworkError);
  CHECK_THROWS_AS(build_network(3, {{1, 2}}), NetworkError);  // node 3 isolated
  CHECK_THROWS_AS(build_network(2, {{1, 5}}), NetworkError);
  CHECK_THROWS_AS(build_network(2, std::span<const std::pair<int, int>>{}), NetworkError);
  CHECK_THROWS_AS(build_network(1, {{1, 1}}), NetworkError);
}

TEST_CASE("cut sets and capacity sums") {
  const FlowNetwork net = build_network(4, {{1, 2}, {1, 3}, {2, 4}, {3, 4}});
  const std::vector<NodeId> u{NodeId{1}, NodeId{2}};
  const CutSets cut = cut_edges(net, u);
  CHECK(cut.incoming.empty());
  CHECK(cut.outgoing == std::vector<EdgeId>{1, 2});

  CapacityVector c(4);
  c << 2, 1, 1, 1;
  CHECK(out_capacity(net, c, NodeId{1}) == doctest::Approx(3));
  CHECK(in_capacity(net, c, NodeId{4}) == doctest::Approx(2));
  const std::vector<EdgeId> sel{0, 3};
  CHECK(restrict_to(c, sel) == Eigen::Vector2d(2, 1));
  CHECK(reachable_from(net, NodeId{2}) == std::vector<NodeId>{NodeId{4}});
}

TEST_CASE("node injection places inflow at origins") {
  const FlowNetwork net = build_network(5, {{1, 3}, {2, 3}, {3, 4}, {3, 5}});
  InflowVector lambda(2);
  lambda << 1.5, 2.5;
  const Vector<double> inj = node_injection(net, lambda);
  CHECK(inj.size() == 5);
  CHECK(inj[0] == 1.5);
  CHECK(inj[1] == 2.5);
  CHECK(inj.tail(3).isZero());
  CHECK_THROWS(node_injection(net, InflowVector::Zero(1)));
}

TEST_CASE("property: random networks are well formed") {
  testing::Rng rng(11);
  for (int trial = 0; trial < 300; ++trial) {
    const FlowNetwork net = testing::random_network(rng);
    for (const Edge& e : net.edges()) REQUIRE(e.tail < e.head);
    for (NodeId v : net.nodes()) {
      const bool no_in = net.in_edges(v).empty();
      const bool no_out = net.out_edges(v).empty();
      REQUIRE_FALSE((no_in && no_out));
      CHECK(net.is_origin(v) == no_in);
      CHECK(net.is_destination(v) == no_out);
      if (!no_out) {
        auto reach = reachable_from(net, v);
        CHECK(std::any_of(reach.begin(), reach.end(), [&](NodeId u) { return net.is_destination(u); }));
      }
    }
  }
}

TEST_CASE("property: relabelling a shuffled network preserves structure") {
  testing::Rng rng(5);
  for (int trial = 0; trial < 100; ++trial) {
    const FlowNetwork base = testing::random_network(rng);
    std::vector<int> perm(static_cast<std::size_t>(base.node_count()));
    std::iota(perm.begin(), perm.end(), 1);
    std::shuffle(perm.begin(), perm.end(), rng);
    std::vector<std::pair<int, int>> edges;
    for (const Edge& e : base.edges()) {
      edges.emplace_back(perm[static_cast<std::size_t>(e.tail.index())], perm[static_cast<std::size_t>(e.head.index())]);
    }
    const FlowNetwork net = build_network(base.node_count(), edges);
    REQUIRE(net.edge_count() == base.edge_count());
    for (const Edge& e : net.edges()) {
      CHECK(e.tail < e.head);
      const auto& [a, b] = edges[static_cast<std::size_t>(e.id)];
      CHECK(net.original_label(e.tail).value == a);
      CHECK(net.original_label(e.head).value == b);
    }
    CHECK(net.origins().size() == base.origins().size());
    CHECK(longest_path_length(net) == longest_path_length(base));
  }
}
