#include <sstream>

#include "doctest.h"
#include "support.hpp"
#include "unilb/error.hpp"
#include "unilb/graph.hpp"
#include "unilb/metric.hpp"
#include "unilb/rng.hpp"

using namespace unilb;
using namespace unilb::testing;

TEST_CASE("graph adjacency is sorted and counts multi-edges") {
  const Graph g = make_graph(3, {{2, 0}, {0, 1}, {0, 1}, {2, 2}});
  CHECK(g.num_edges() == 4);
  CHECK(g.degree(0) == 3);
  CHECK(g.degree(2) == 3);  // self-loop counts twice
  const auto nb = g.neighbors(0);
  CHECK(std::is_sorted(nb.begin(), nb.end()));
  CHECK(g.parallel_edge_count() == 1);
  CHECK(g.self_loop_count() == 1);
  CHECK_FALSE(g.is_simple());
  CHECK(g.has_edge(1, 0));
  CHECK_FALSE(g.has_edge(1, 2));
}

TEST_CASE("graph rejects out-of-range endpoints") {
  CHECK_THROWS_AS(make_graph(2, {{0, 2}}), InvalidArgument);
}

TEST_CASE("regularity, connectivity and bipartiteness") {
  CHECK(petersen_graph().regular_degree() == 3);
  CHECK(path_graph(4).regular_degree() == std::nullopt);
  CHECK(cycle_graph(6).is_connected());
  CHECK_FALSE(make_graph(4, {{0, 1}, {2, 3}}).is_connected());
  CHECK(bipartition(cycle_graph(6)).has_value());
  CHECK_FALSE(bipartition(cycle_graph(5)).has_value());
}

TEST_CASE("girth of small graphs") {
  CHECK(girth(complete_graph(4)) == 3);
  CHECK(girth(path_graph(5)) == std::nullopt);
  CHECK(girth(star_graph(6)) == std::nullopt);
  CHECK(girth(petersen_graph()) == 5);
  CHECK(girth(cycle_graph(7)) == 7);
  CHECK(girth(wagner_graph()) == 4);
  CHECK(girth(make_graph(2, {{0, 1}, {0, 1}})) == 2);
  for (Vertex v = 0; v < 10; ++v) CHECK(girth_from(petersen_graph(), v) == 5);
}

TEST_CASE("diameter and eccentricity") {
  CHECK(graph_diameter(petersen_graph()) == 2);
  CHECK(graph_diameter(path_graph(5)) == 4);
  CHECK(eccentricity(path_graph(5), 2) == 2);
  CHECK_THROWS(eccentricity(make_graph(3, {{0, 1}}), 0));
}

TEST_CASE("graph text round trip") {
  const Graph g = petersen_graph();
  std::stringstream ss;
  write_graph(ss, g);
  const Graph h = read_graph(ss);
  CHECK(h.num_vertices() == 10);
  CHECK(h.edges() == g.edges());
  std::stringstream bad("3 2\n0 1\n");
  CHECK_THROWS_AS(read_graph(bad), InvalidArgument);
}

TEST_CASE("shortest-path metric examples") {
  const MetricSpace p = shortest_path_metric(path_graph(3), 0);
  CHECK(p(0, 2) == 2.0);
  CHECK(p(0, 1) == 1.0);
  CHECK(diameter(p) == 2.0);
  const MetricSpace k3 = shortest_path_metric(complete_graph(3), 0);
  for (Vertex a = 0; a < 3; ++a) {
    for (Vertex b = 0; b < 3; ++b) CHECK(k3(a, b) == (a == b ? 0.0 : 1.0));
  }
  CHECK(diameter(k3) == 1.0);
  const MetricSpace pet = shortest_path_metric(petersen_graph(), 0);
  CHECK(diameter(pet) == 2.0);
  for (Vertex a = 0; a < 10; ++a) {
    for (Vertex b = 0; b < 10; ++b) {
      if (a != b) CHECK((pet(a, b) == 1.0 || pet(a, b) == 2.0));
    }
  }
  CHECK_FALSE(validate_metric(pet).has_value());
  CHECK_THROWS_AS(shortest_path_metric(make_graph(3, {{0, 1}}), 0), InvalidArgument);
}

TEST_CASE("weighted shortest-path metric") {
  const Graph g = cycle_graph(4);
  const std::vector<Cost> w = {1.0, 1.0, 1.0, 10.0};  // edge 3-0 is expensive
  const MetricSpace m = shortest_path_metric(g, w, 0);
  CHECK(m(0, 3) == 3.0);
  CHECK_FALSE(validate_metric(m).has_value());
}

TEST_CASE("validate_metric reports the violated triangle") {
  // a=0, b=1, c=2: d(a,b)=5 > d(a,c)+d(c,b)=2.
  const MetricSpace m(3, 0, {0, 5, 1, 5, 0, 1, 1, 1, 0});
  const auto v = validate_metric(m);
  REQUIRE(v.has_value());
  CHECK(v->kind == MetricViolationKind::kTriangle);
  CHECK(v->vertices == std::array<Vertex, 3>{0, 2, 1});
  CHECK_FALSE(validate_metric(MetricSpace(1, 0, {0.0})).has_value());
  CHECK(validate_metric(MetricSpace(2, 0, {0, 1, 2, 0}))->kind == MetricViolationKind::kAsymmetric);
  CHECK(validate_metric(MetricSpace(2, 0, {0, 0, 0, 0}))->kind == MetricViolationKind::kZeroOffDiagonal);
}

TEST_CASE("random metrics are metrics and reproducible") {
  Rng a(7), b(7);
  const MetricSpace m1 = random_metric(20, 3, 9, a);
  const MetricSpace m2 = random_metric(20, 3, 9, b);
  CHECK(m1.table() == m2.table());
  CHECK(m1.root() == 3);
  CHECK_FALSE(validate_metric(m1).has_value());
}

TEST_CASE("metric text round trip") {
  Rng rng(3);
  const MetricSpace m = random_metric(6, 2, 5, rng);
  std::stringstream ss;
  write_metric(ss, m);
  const MetricSpace r = read_metric(ss);
  CHECK(r.root() == 2);
  CHECK(r.table() == m.table());
}

TEST_CASE("seed derivation is stable and distinct") {
  CHECK(derive_seed(1, 0) != derive_seed(1, 1));
  CHECK(derive_seed(1, 5) == derive_seed(1, 5));
  Rng r(11);
  for (int i = 0; i < 1000; ++i) {
    CHECK(r.uniform_below(7) < 7);
    const double u = r.uniform01();
    CHECK((u >= 0.0 && u < 1.0));
  }
}
