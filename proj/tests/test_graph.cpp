#include <algorithm>
#include <doctest.h>
#include <qgraph/graph.hpp>
#include <qgraph/rng.hpp>
#include <set>

#include "test_util.hpp"

using namespace qgraph;

namespace {

// Independent cycle-rank oracle: b1 = #E - rank of the incidence matrix over
// GF(2). Loops give zero columns, so they count as independent cycles.
int gf2_cycle_rank(const Graph& g) {
  const int v_count = g.vertex_count();
  const int e_count = g.edge_count();
  std::vector<std::vector<int>> col(static_cast<size_t>(e_count),
                                    std::vector<int>(static_cast<size_t>(v_count), 0));
  for (int e = 0; e < e_count; ++e) {
    col[static_cast<size_t>(e)][static_cast<size_t>(g.edge(e).tail)] ^= 1;
    col[static_cast<size_t>(e)][static_cast<size_t>(g.edge(e).head)] ^= 1;
  }
  int rank = 0;
  std::vector<int> pivot_of_row(static_cast<size_t>(v_count), -1);
  for (int e = 0; e < e_count; ++e) {
    auto& c = col[static_cast<size_t>(e)];
    for (int r = 0; r < v_count; ++r)
      if (c[static_cast<size_t>(r)] && pivot_of_row[static_cast<size_t>(r)] >= 0)
        for (int rr = 0; rr < v_count; ++rr)
          c[static_cast<size_t>(rr)] ^= col[static_cast<size_t>(
              pivot_of_row[static_cast<size_t>(r)])][static_cast<size_t>(rr)];
    for (int r = 0; r < v_count; ++r)
      if (c[static_cast<size_t>(r)]) {
        pivot_of_row[static_cast<size_t>(r)] = e;
        ++rank;
        break;
      }
  }
  return e_count - rank;
}

Graph random_connected_graph(Rng& rng, int v_count, int extra_edges) {
  std::vector<Edge> edges;
  for (int v = 1; v < v_count; ++v)
    edges.push_back({static_cast<int>(rng.below(static_cast<std::uint64_t>(v))), v});
  for (int i = 0; i < extra_edges; ++i)
    edges.push_back({static_cast<int>(rng.below(static_cast<std::uint64_t>(v_count))),
                     static_cast<int>(rng.below(static_cast<std::uint64_t>(v_count)))});
  return build_graph(v_count, edges);
}

}  // namespace

TEST_CASE("construction validates input") {
  CHECK_THROWS_AS(build_graph(2, {{0, 2}}), InvalidVertexId);
  CHECK_THROWS_AS(build_graph(2, {{-1, 0}}), InvalidVertexId);
  CHECK_THROWS_AS(build_graph(3, {}), EmptyEdgeList);
  CHECK_THROWS_AS(build_graph(4, {{0, 1}, {2, 3}}), DisconnectedGraph);
  CHECK_THROWS_AS(build_metric_graph(2, {{0, 1}}, {1.0, 2.0}), DimensionMismatch);
  CHECK_THROWS_AS(build_metric_graph(2, {{0, 1}}, {-1.0}), InvalidInput);
  CHECK_THROWS_AS(build_metric_graph(2, {{0, 1}}, {0.0}), InvalidInput);
}

TEST_CASE("degrees count loop ends twice") {
  auto star = fixtures::star3().graph;
  CHECK(star.degree(0) == 3);
  CHECK(star.degree(1) == 1);

  auto cherry = fixtures::cherry().graph;
  CHECK(cherry.degree(0) == 3);
  CHECK(cherry.degree(1) == 1);
  CHECK(cherry.is_loop(0));
  CHECK(!cherry.is_loop(1));

  auto eight = fixtures::eight().graph;
  CHECK(eight.degree(0) == 4);
}

TEST_CASE("betti number matches GF(2) cycle rank") {
  CHECK(fixtures::star3().graph.betti_number() == 0);
  CHECK(fixtures::eight().graph.betti_number() == 2);
  CHECK(fixtures::cherry().graph.betti_number() == 1);
  CHECK(fixtures::k4_unit().graph.betti_number() == 3);

  Rng rng(71);
  for (int trial = 0; trial < 50; ++trial) {
    const int v = 2 + static_cast<int>(rng.below(8));
    const int extra = static_cast<int>(rng.below(5));
    Graph g = random_connected_graph(rng, v, extra);
    CAPTURE(trial);
    CHECK(g.betti_number() == gf2_cycle_rank(g));
  }
}

TEST_CASE("bipartite and circle predicates") {
  CHECK(fixtures::star3().graph.is_bipartite());
  CHECK(fixtures::interval().graph.is_bipartite());
  CHECK(!fixtures::c3_unit().graph.is_bipartite());
  CHECK(!fixtures::k4_unit().graph.is_bipartite());
  CHECK(!fixtures::eight().graph.is_bipartite());  // loop is an odd cycle

  CHECK(fixtures::circle().graph.is_circle());
  CHECK(fixtures::c3_unit().graph.is_circle());
  CHECK(!fixtures::star3().graph.is_circle());
  CHECK(!fixtures::cherry().graph.is_circle());
}

TEST_CASE("suppressing degree-2 vertices merges edge runs") {
  // Path on 4 vertices collapses to a single edge with summed length.
  auto path = build_metric_graph(4, {{0, 1}, {1, 2}, {2, 3}}, {0.25, 1.0, 0.5});
  auto sup = suppress_degree_two(path);
  CHECK(sup.metric.graph.edge_count() == 1);
  CHECK(sup.metric.graph.vertex_count() == 2);
  CHECK(sup.metric.lengths[0] == doctest::Approx(1.75).epsilon(1e-15));
  REQUIRE(sup.merged.size() == 1);
  CHECK(sup.merged[0].size() == 3);
  // Parts listed tail-to-head.
  CHECK(sup.merged[0][0].edge == 0);
  CHECK(sup.merged[0][2].edge == 2);

  // No degree-2 vertex: unchanged.
  auto star = fixtures::star3();
  auto sup_star = suppress_degree_two(star);
  CHECK(sup_star.metric.graph.edge_count() == 3);
  CHECK(sup_star.metric.graph.vertex_count() == 4);

  // A bare cycle only collapses on request.
  auto c3 = fixtures::c3_unit();
  CHECK_THROWS_AS(suppress_degree_two(c3.graph), Error);
  auto collapsed = suppress_degree_two(c3.graph, true);
  CHECK(collapsed.graph.vertex_count() == 1);
  CHECK(collapsed.graph.edge_count() == 1);
  CHECK(collapsed.graph.is_loop(0));
}

TEST_CASE("suppression respects traversal orientation") {
  // Middle edge deliberately against the path direction.
  auto path = build_metric_graph(4, {{0, 1}, {2, 1}, {2, 3}}, {1.0, 1.0, 1.0});
  auto sup = suppress_degree_two(path);
  REQUIRE(sup.merged.size() == 1);
  REQUIRE(sup.merged[0].size() == 3);
  const bool forward_first = sup.merged[0][0].edge == 0 && !sup.merged[0][0].reversed;
  const bool backward_first = sup.merged[0][0].edge == 2 && sup.merged[0][0].reversed;
  CHECK((forward_first || backward_first));
  // The middle edge must be flagged reversed in the forward reading.
  if (forward_first) CHECK(sup.merged[0][1].reversed);
}

TEST_CASE("edge contraction merges endpoint classes") {
  auto star = fixtures::star3().graph;
  auto con = contract_edges(star, {0});
  CHECK(con.graph.vertex_count() == 3);
  CHECK(con.graph.edge_count() == 2);
  CHECK(con.vertex_map[0] == con.vertex_map[1]);

  // Contracting a loop only deletes it.
  auto cherry = fixtures::cherry().graph;
  auto con2 = contract_edges(cherry, {0});
  CHECK(con2.graph.vertex_count() == 2);
  CHECK(con2.graph.edge_count() == 1);

  // Contracting everything is rejected: no graph would remain.
  CHECK_THROWS_AS(contract_edges(fixtures::interval().graph, {0}), ContractAllEdges);

  // Component-wise identification: order of X does not matter.
  auto path = build_graph(4, {{0, 1}, {1, 2}, {2, 3}});
  auto a = contract_edges(path, {0, 1});
  auto b = contract_edges(path, {1, 0});
  CHECK(a.vertex_map == b.vertex_map);
  CHECK(a.kept == b.kept);
}

TEST_CASE("reduction identifies the five minimal shapes") {
  auto cls = [](const Graph& g) { return reduce_to_minimal(g).cls; };
  CHECK(cls(fixtures::star3().graph) == MinimalClass::star3);
  CHECK(cls(fixtures::eight().graph) == MinimalClass::eight);
  CHECK(cls(fixtures::cherry().graph) == MinimalClass::cherry);
  CHECK(cls(fixtures::circle().graph) == MinimalClass::circle);
  CHECK(cls(fixtures::c3_unit().graph) == MinimalClass::circle);
  CHECK(cls(fixtures::interval().graph) == MinimalClass::interval);
  CHECK(cls(build_graph(4, {{0, 1}, {1, 2}, {2, 3}})) == MinimalClass::interval);

  // Trees with a branch vertex.
  CHECK(cls(build_graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}})) == MinimalClass::star3);
  CHECK(cls(build_graph(6, {{0, 1}, {1, 2}, {2, 3}, {2, 4}, {4, 5}})) == MinimalClass::star3);

  // Higher cycle rank lands on the eight.
  CHECK(cls(build_graph(2, {{0, 1}, {0, 1}, {0, 1}})) == MinimalClass::eight);
  CHECK(cls(fixtures::k4_unit().graph) == MinimalClass::eight);

  // One independent cycle plus extra structure is a cherry.
  CHECK(cls(build_graph(4, {{0, 1}, {1, 2}, {2, 0}, {0, 3}})) == MinimalClass::cherry);
}

TEST_CASE("reduction contraction set reaches the minimal representative") {
  auto verify = [](const Graph& g) {
    auto red = reduce_to_minimal(g);
    Graph reduced = g;
    if (!red.contracted.empty()) reduced = contract_edges(g, red.contracted).graph;
    auto sup = suppress_degree_two(reduced, true);
    switch (red.cls) {
      case MinimalClass::star3:
        CHECK(sup.graph.vertex_count() == 4);
        CHECK(sup.graph.edge_count() == 3);
        CHECK(sup.graph.betti_number() == 0);
        break;
      case MinimalClass::eight:
        CHECK(sup.graph.vertex_count() == 1);
        CHECK(sup.graph.edge_count() == 2);
        CHECK(sup.graph.betti_number() == 2);
        break;
      case MinimalClass::cherry:
        CHECK(sup.graph.vertex_count() == 2);
        CHECK(sup.graph.edge_count() == 2);
        CHECK(sup.graph.betti_number() == 1);
        break;
      case MinimalClass::circle:
        CHECK(sup.graph.edge_count() == 1);
        CHECK(sup.graph.is_loop(0));
        break;
      case MinimalClass::interval:
        CHECK(sup.graph.edge_count() == 1);
        CHECK(!sup.graph.is_loop(0));
        break;
    }
  };

  verify(build_graph(2, {{0, 1}, {0, 1}, {0, 1}}));          // theta
  verify(fixtures::k4_unit().graph);                          // K4, b1 = 3
  verify(build_graph(5, {{0, 1}, {0, 2}, {0, 3}, {0, 4}}));  // 4-leg spider
  verify(build_graph(4, {{0, 1}, {1, 2}, {2, 0}, {0, 3}}));  // lasso
  verify(build_graph(6, {{0, 1}, {1, 2}, {2, 3}, {2, 4}, {4, 5}}));

  Rng rng(9000);
  for (int trial = 0; trial < 30; ++trial) {
    const int v = 2 + static_cast<int>(rng.below(7));
    Graph g = random_connected_graph(rng, v, static_cast<int>(rng.below(4)));
    CAPTURE(trial);
    verify(g);
  }
}

TEST_CASE("minimal scar supports enumerate leaf paths and simple cycles") {
  auto star_sup = minimal_scar_supports(fixtures::star3().graph);
  CHECK(star_sup.size() == 3);  // one per leaf pair
  for (const auto& s : star_sup) {
    CHECK(s.kind == ScarSupport::Kind::path);
    CHECK(s.edge_seq.size() == 2);
    CHECK(s.vertex_seq.size() == 3);
    CHECK(s.vertex_seq[1] == 0);  // through the center
  }

  auto eight_sup = minimal_scar_supports(fixtures::eight().graph);
  CHECK(eight_sup.size() == 2);  // each loop separately; the combined walk repeats the vertex
  for (const auto& s : eight_sup) {
    CHECK(s.kind == ScarSupport::Kind::cycle);
    CHECK(s.edge_seq.size() == 1);
  }

  auto cherry_sup = minimal_scar_supports(fixtures::cherry().graph);
  REQUIRE(cherry_sup.size() == 1);  // pendant path lacks a second leaf endpoint
  CHECK(cherry_sup[0].kind == ScarSupport::Kind::cycle);
  CHECK(cherry_sup[0].edge_seq == std::vector<int>{0});

  auto k4_sup = minimal_scar_supports(fixtures::k4_unit().graph);
  int cycles = 0;
  for (const auto& s : k4_sup)
    if (s.kind == ScarSupport::Kind::cycle) ++cycles;
  CHECK(cycles == 7);  // 4 triangles + 3 quadrilaterals
  CHECK(k4_sup.size() == 7);  // no degree-1 vertices, so no paths

  CHECK_THROWS_AS(minimal_scar_supports(fixtures::k4_unit().graph, 3),
                  EnumerationBudgetExceeded);
}
