#include <cmath>
#include <set>
#include <sstream>

#include "doctest.h"
#include "support.hpp"
#include "unilb/error.hpp"
#include "unilb/universal.hpp"

using namespace unilb;
using namespace unilb::testing;

namespace {

// Uniformly random rooted tree on n vertices: each vertex i > 0 hangs off a
// random earlier vertex of a shuffled labeling.
SpanningTree random_tree(std::size_t n, Vertex root, const HopCost& hop, Rng& rng) {
  std::vector<Vertex> label(n);
  std::iota(label.begin(), label.end(), 0);
  rng.shuffle(label);
  std::swap(*std::find(label.begin(), label.end(), root), label[0]);
  std::vector<Vertex> parent(n);
  parent[root] = root;
  for (std::size_t i = 1; i < n; ++i) parent[label[i]] = label[rng.uniform_below(i)];
  return SpanningTree(root, parent, hop);
}

std::vector<Vertex> random_subset(std::size_t n, Rng& rng) {
  std::vector<Vertex> x;
  for (Vertex v = 0; v < n; ++v) {
    if (rng.uniform01() < 0.4) x.push_back(v);
  }
  return x;
}

}  // namespace

TEST_CASE("spanning tree validation") {
  const HopCost unit = unit_hop_cost();
  CHECK_THROWS_AS(SpanningTree(0, {0, 2, 1}, unit), InvalidArgument);  // 1 <-> 2 cycle
  const SpanningTree t(0, {0, 0, 1}, unit);
  CHECK(t.is_spanning());
  CHECK(t.total_cost() == 2.0);
  CHECK(t.path_to_root(2) == std::vector<Vertex>{2, 1, 0});
  CHECK(t.tree_distance(2, 0) == 2.0);
}

TEST_CASE("shortest-path tree examples") {
  const Graph star = star_graph(5);
  const SpanningTree t = shortest_path_tree(star, 0, unit_hop_cost());
  for (Vertex v = 1; v < 5; ++v) CHECK(t.parent(v) == 0);
  const SpanningTree p = shortest_path_tree(path_graph(3), 0, unit_hop_cost());
  CHECK(p.parent(2) == 1);
  CHECK(p.parent(1) == 0);
  // c(T[X]) <= sum of root distances for every X.
  const Graph pet = petersen_graph();
  const MetricSpace m = shortest_path_metric(pet, 0);
  const SpanningTree spt = shortest_path_tree(m, pet);
  for (std::size_t mask = 0; mask < 1024; ++mask) {
    std::vector<Vertex> x;
    Cost bound = 0.0;
    for (Vertex v = 0; v < 10; ++v) {
      if (mask >> v & 1) {
        x.push_back(v);
        bound += m(v, 0);
      }
    }
    CHECK(project_tree(spt, x).cost <= bound);
    CHECK(bound <= static_cast<double>(x.size()) * diameter(m));
  }
}

TEST_CASE("tree projection examples") {
  const SpanningTree star = shortest_path_tree(star_graph(4), 0, unit_hop_cost());
  CHECK(project_tree(star, std::vector<Vertex>{}).cost == 0.0);
  CHECK(project_tree(star, std::vector<Vertex>{0}).cost == 0.0);
  CHECK(project_tree(star, std::vector<Vertex>{1, 2, 3}).cost == star.total_cost());
  const auto two = project_tree(star, std::vector<Vertex>{1, 2});
  CHECK(two.cost == 2.0);
  CHECK(two.edges == std::vector<EdgeKey>{edge_key(0, 1), edge_key(0, 2)});
}

TEST_CASE("depth-first tours") {
  const Graph star = star_graph(4);
  const MetricSpace ms = shortest_path_metric(star, 0);
  const SpanningTree ts = shortest_path_tree(star, 0, unit_hop_cost());
  const TourOrder s = tree_to_tour(ts);
  CHECK(s.order == std::vector<Vertex>{1, 2, 3});
  CHECK(project_tour(s, ms, std::vector<Vertex>{1, 2, 3}) == 6.0);

  const Graph path = path_graph(3);
  const MetricSpace mp = shortest_path_metric(path, 0);
  const TourOrder p = tree_to_tour(shortest_path_tree(path, 0, unit_hop_cost()));
  CHECK(p.order == std::vector<Vertex>{1, 2});
  CHECK(project_tour(p, mp, std::vector<Vertex>{1, 2}) == 4.0);
}

TEST_CASE("tour projection on the 4-cycle") {
  const MetricSpace m = shortest_path_metric(cycle_graph(4), 0);  // r=0, a=1, b=2, c=3
  const TourOrder sigma{0, {1, 2, 3}};
  CHECK(project_tour(sigma, m, std::vector<Vertex>{2}) == 4.0);
  CHECK(project_tour(sigma, m, std::vector<Vertex>{1, 3}) == 4.0);
  CHECK(project_tour(sigma, m, std::vector<Vertex>{1}) == 2.0 * m(0, 1));
  CHECK(tour_restriction(sigma, std::vector<Vertex>{3, 1}) == std::vector<Vertex>{1, 3});
}

TEST_CASE("doubling and contiguity on random trees") {
  Rng rng(99);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + rng.uniform_below(12);
    const MetricSpace m = random_metric(n, 0, 10, rng);
    const SpanningTree t = random_tree(n, 0, metric_hop_cost(m), rng);
    const TourOrder sigma = tree_to_tour(t);
    for (int k = 0; k < 20; ++k) {
      const auto x = random_subset(n, rng);
      const Cost tree_cost = project_tree(t, x).cost;
      CHECK(project_tour(sigma, m, x) <= 2.0 * tree_cost + 1e-9);
      const TourOrder sub = tree_to_tour(induced_subtree(t, x));
      const TerminalSet xs = make_terminal_set(x, 0);
      std::vector<Vertex> restricted;
      for (Vertex v : sub.order) {
        if (std::binary_search(xs.begin(), xs.end(), v)) restricted.push_back(v);
      }
      CHECK(restricted == tour_restriction(sigma, xs));
    }
  }
}

TEST_CASE("path collections from trees") {
  const SpanningTree star = shortest_path_tree(star_graph(4), 0, unit_hop_cost());
  const PathCollection ps = tree_to_path_collection(star);
  for (Vertex v = 1; v < 4; ++v) CHECK(ps.path(v).vertices == std::vector<Vertex>{v, 0});
  CHECK(ps.path(0).vertices == std::vector<Vertex>{0});
  const PathCollection pp = tree_to_path_collection(shortest_path_tree(path_graph(3), 0, unit_hop_cost()));
  CHECK(pp.path(2).vertices == std::vector<Vertex>{2, 1, 0});
  CHECK(project_paths(pp, std::vector<Vertex>{2}).cost == 2.0);

  Rng rng(5);
  for (int rep = 0; rep < 100; ++rep) {
    const std::size_t n = 2 + rng.uniform_below(15);
    const MetricSpace m = random_metric(n, 0, 10, rng);
    const SpanningTree t = random_tree(n, 0, metric_hop_cost(m), rng);
    const PathCollection p = tree_to_path_collection(t);
    for (int k = 0; k < 100; ++k) {
      const auto x = random_subset(n, rng);
      CHECK(project_paths(p, x).cost == doctest::Approx(project_tree(t, x).cost));
    }
  }
}

TEST_CASE("path union counts shared edges once") {
  const PathCollection p = make_path_collection(0, {{0}, {1, 0}, {2, 1, 0}, {3, 1, 0}}, unit_hop_cost());
  CHECK(project_paths(p, std::vector<Vertex>{2, 3}).cost == 3.0);
  CHECK_THROWS(make_path_collection(0, {{0}, {1, 2}}, unit_hop_cost()));  // does not end at the root
}

TEST_CASE("FRT on tiny metrics") {
  Rng rng(1);
  const MetricSpace one(1, 0, {0.0});
  const Hst h1 = frt_sample(one, rng);
  CHECK(h1.num_points() == 1);
  CHECK(h1.distance(0, 0) == 0.0);
  const MetricSpace two(2, 0, {0.0, 3.0, 3.0, 0.0});
  for (int i = 0; i < 50; ++i) {
    const Hst h = frt_sample(two, rng);
    CHECK(h.distance(0, 1) >= 3.0);
    CHECK(h.distance(0, 1) <= 2.0 * 3.0 * 16.0);
    const SpanningTree t = hst_to_spanning_tree(h, two);
    CHECK(t.parent(1) == 0);
    CHECK(t.total_cost() == 3.0);
  }
}

TEST_CASE("FRT domination, contraction and nesting") {
  Rng rng(8);
  for (int rep = 0; rep < 20; ++rep) {
    const MetricSpace m = random_metric(24, 0, 30, rng);
    const Hst h = frt_sample(m, rng);
    for (Vertex u = 0; u < 24; ++u) {
      for (Vertex v = 0; v < 24; ++v) CHECK(h.distance(u, v) >= m(u, v) - 1e-9);
    }
    for (const HstNode& node : h.nodes()) {
      if (node.children.empty()) {
        CHECK(node.members.size() == 1);
        continue;
      }
      std::vector<Vertex> merged;
      for (std::size_t c : node.children) {
        const auto& cm = h.nodes()[c].members;
        merged.insert(merged.end(), cm.begin(), cm.end());
        CHECK(h.nodes()[c].level == node.level - 1);
      }
      std::sort(merged.begin(), merged.end());
      CHECK(merged == node.members);
    }
    const SpanningTree t = hst_to_spanning_tree(h, m);
    CHECK(t.is_spanning());
    CHECK(t.root() == 0);
    CHECK(t.total_cost() <= h.total_weight() + 1e-9);
  }
}

TEST_CASE("FRT mean stretch on a 64-point metric") {
  Rng rng(64);
  const MetricSpace m = random_metric(64, 0, 100, rng);
  std::vector<double> sum(64 * 64, 0.0);
  const int draws = 1000;
  for (int i = 0; i < draws; ++i) {
    const Hst h = frt_sample(m, rng);
    for (Vertex u = 0; u < 64; ++u) {
      for (Vertex v = u + 1; v < 64; ++v) sum[u * 64 + v] += h.distance(u, v);
    }
  }
  double mean = 0.0;
  for (Vertex u = 0; u < 64; ++u) {
    for (Vertex v = u + 1; v < 64; ++v) mean += sum[u * 64 + v] / draws / m(u, v);
  }
  mean /= 64.0 * 63.0 / 2.0;
  MESSAGE("mean HST stretch over pairs: " << mean << " (reference 8 ln 64 = " << 8.0 * std::log(64.0) << ")");
  CHECK(mean >= 1.0);
}

TEST_CASE("HST projection agrees with marked-subtree weight") {
  Rng rng(12);
  const MetricSpace m = random_metric(10, 0, 9, rng);
  const Hst h = frt_sample(m, rng);
  CHECK(h.project(std::vector<Vertex>{}, 0) == 0.0);
  std::vector<Vertex> all(10);
  std::iota(all.begin(), all.end(), 0);
  CHECK(h.project(all, 0) == doctest::Approx(h.total_weight()));
  // Two leaves: the projection is their HST distance when one is the root.
  CHECK(h.project(std::vector<Vertex>{5}, 0) == doctest::Approx(h.distance(0, 5)));
}

TEST_CASE("solution variant helpers and I/O") {
  const MetricSpace m = shortest_path_metric(cycle_graph(5), 0);
  const SpanningTree t = shortest_path_tree(m, cycle_graph(5));
  const Solution a = t;
  const Solution b = tree_to_path_collection(t);
  const Solution c = tree_to_tour(t);
  CHECK(solution_kind(a) == "tree");
  CHECK(solution_kind(b) == "paths");
  CHECK(solution_kind(c) == "tour");
  const std::vector<Vertex> x{2, 3};
  CHECK(projected_cost(a, metric_hop_cost(m), x) == projected_cost(b, metric_hop_cost(m), x));

  std::stringstream ts;
  write_tree(ts, t);
  CHECK(read_tree(ts, metric_hop_cost(m)).parents() == t.parents());
  std::stringstream os;
  write_tour(os, std::get<TourOrder>(c));
  CHECK(read_tour(os, 0).order == std::get<TourOrder>(c).order);
  std::stringstream ps;
  write_paths(ps, std::get<PathCollection>(b));
  CHECK(read_paths(ps, 0, metric_hop_cost(m)).path(3).vertices == std::get<PathCollection>(b).path(3).vertices);
}
