#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "unilb/adversary.hpp"
#include "unilb/error.hpp"

using namespace unilb;
using namespace unilb::testing;

namespace {

WalkTrace walk_of(std::vector<Vertex> vs) {
  WalkTrace w;
  w.vertices = std::move(vs);
  return w;
}

}  // namespace

TEST_CASE("config defaults") {
  const auto c = default_steiner_config(8);
  CHECK(c.t == 2);
  CHECK(c.max_bad == doctest::Approx(0.25));
  CHECK(c.min_distinct == doctest::Approx(1.0));
  CHECK(default_steiner_config(2).t == 1);
  const auto tsp = default_tsp_config(2184, 6);
  const double logd = std::log(2184.0) / std::log(6.0);
  CHECK(tsp.t == std::max<std::size_t>(1, static_cast<std::size_t>(logd / 4)));
  CHECK(tsp.blocks == static_cast<std::size_t>(std::lround(logd)));
}

TEST_CASE("first edge sets") {
  const SpanningTree star = shortest_path_tree(star_graph(5), 0, unit_hop_cost());
  const auto f = first_edge_set(tree_to_path_collection(star));
  CHECK(f == std::vector<EdgeKey>{edge_key(0, 1), edge_key(0, 2), edge_key(0, 3), edge_key(0, 4)});
  const SpanningTree path = shortest_path_tree(path_graph(4), 0, unit_hop_cost());
  const auto fp = first_edge_set(tree_to_path_collection(path));
  CHECK(fp == std::vector<EdgeKey>{edge_key(0, 1), edge_key(1, 2), edge_key(2, 3)});
  const auto inst = lps_graph(5, 13);
  const auto fl = first_edge_set(tree_to_path_collection(shortest_path_tree(inst.graph, 0, unit_hop_cost())));
  CHECK(fl.size() <= inst.graph.num_vertices());
}

TEST_CASE("good-walk thresholds are closed") {
  SteinerAdversaryConfig cfg = steiner_config_for(8);  // at most 1 bad edge, at least 4 distinct
  const std::vector<EdgeKey> f{edge_key(0, 1), edge_key(2, 3)};
  const auto clean = is_good_walk(walk_of({4, 5, 6, 7, 8, 9, 10, 11, 12}), f, cfg);
  CHECK(clean.good);
  CHECK(clean.bad_edges == 0);
  CHECK(clean.distinct == 9);
  const auto two_bad = is_good_walk(walk_of({0, 1, 4, 5, 6, 7, 8, 2, 3}), f, cfg);
  CHECK(two_bad.bad_edges == 2);
  CHECK_FALSE(two_bad.good);
  // One bad edge and exactly four distinct vertices.
  const auto boundary = is_good_walk(walk_of({0, 1, 4, 5, 4, 5, 4, 5, 4}), f, cfg);
  CHECK(boundary.bad_edges == 1);
  CHECK(boundary.distinct == 4);
  CHECK(boundary.good);
  // Repeated traversals of one F-edge count each time.
  CHECK(is_good_walk(walk_of({0, 1, 0, 4, 5, 6, 7, 8, 9}), f, cfg).bad_edges == 2);
}

TEST_CASE("Steiner adversary samples") {
  const Graph pet = petersen_graph();
  Rng rng(2);
  SteinerAdversaryConfig zero = steiner_config_for(1);
  zero.t = 0;
  CHECK(steiner_adversary_sample(pet, 0, zero, 5, rng).terminals.size() <= 1);
  const auto cfg = steiner_config_for(1);
  for (int i = 0; i < 100; ++i) {
    const auto s = steiner_adversary_sample(pet, 0, cfg, 5, rng);
    CHECK(s.terminals.size() <= cfg.t + 1);
    CHECK(is_valid_walk(pet, s.walk));
  }
  CHECK_THROWS_AS(steiner_adversary_sample(pet, 0, steiner_config_for(2), 5, rng), PreconditionError);
  CHECK_THROWS_AS(steiner_adversary_sample(pet, 0, cfg, std::nullopt, rng), PreconditionError);
  SteinerAdversaryConfig loose = steiner_config_for(4);
  loose.certificate_mode = false;
  CHECK_NOTHROW(steiner_adversary_sample(pet, 0, loose, 5, rng));
}

TEST_CASE("Steiner certificate on a 12-cycle") {
  // Girth 12, so t may be 4. The SPT from 0 on C12 uses every edge but 6-7,
  // so the only good walk bounces on that edge.
  const Graph c = cycle_graph(12);
  const PathCollection p = tree_to_path_collection(shortest_path_tree(c, 0, unit_hop_cost()));
  const auto cfg = steiner_config_for(4);
  const auto w = walk_of({6, 7, 6, 7, 6});
  const auto r = steiner_certificate(p, w, 12, cfg);
  CHECK(r.holds);
  CHECK_FALSE(r.conflict.has_value());
  CHECK(r.reduced_terminals == std::vector<Vertex>{6, 7});
  CHECK(r.lhs == 11.0);
  CHECK(r.rhs == doctest::Approx(2.0 * 12.0 / 6.0));
  CHECK(r.lhs >= r.rhs);
  // Too long for the girth.
  CHECK_THROWS_AS(steiner_certificate(p, walk_of({5, 6, 7, 8, 9, 10}), 12, steiner_config_for(5)), PreconditionError);
  // Not good: two F-edge traversals with threshold 0.5.
  CHECK_THROWS_AS(steiner_certificate(p, walk_of({1, 0, 11, 10, 9}), 12, cfg), PreconditionError);
}

TEST_CASE("Steiner certificate with no surviving terminals") {
  const Graph c = cycle_graph(12);
  const PathCollection p = tree_to_path_collection(shortest_path_tree(c, 0, unit_hop_cost()));
  SteinerAdversaryConfig cfg = steiner_config_for(1);
  cfg.max_bad = 1.0;
  cfg.min_distinct = 0.0;
  // The only step is the F-edge 2-1, so both endpoints drop out of X'.
  const auto r = steiner_certificate(p, walk_of({2, 1}), 12, cfg);
  CHECK(r.reduced_terminals.empty());
  CHECK(r.stub_bound == 0.0);
  CHECK(r.rhs == 0.0);
  CHECK(r.holds);
}

TEST_CASE("Steiner certificate holds on sampled good walks of LPS(5,13)") {
  const auto inst = lps_graph(5, 13);
  const std::size_t g = *inst.certificate.girth;
  const PathCollection p = tree_to_path_collection(shortest_path_tree(inst.graph, 0, unit_hop_cost()));
  const auto f = first_edge_set(p);
  const auto cfg = default_steiner_config(g);
  Rng rng(5);
  std::size_t checked = 0;
  for (int i = 0; i < 3000; ++i) {
    const auto s = steiner_adversary_sample(inst.graph, 0, cfg, g, rng);
    if (!is_good_walk(s.walk, f, cfg).good) continue;
    const auto r = steiner_certificate(p, f, s.walk, g, cfg);
    CHECK(r.holds);
    ++checked;
  }
  CHECK(checked > 500);
}

TEST_CASE("good-walk frequency edge cases") {
  const Graph k6 = complete_graph(6);
  SteinerAdversaryConfig cfg = steiner_config_for(2);
  cfg.certificate_mode = false;
  const auto none = good_walk_frequency(k6, std::vector<EdgeKey>{}, cfg, 2000, 3);
  CHECK(none.frequency == 1.0);  // K6 walks never repeat consecutively, 2 steps give >= 2 distinct
  std::vector<EdgeKey> all;
  for (const Edge& e : k6.edges()) all.push_back(edge_key(e.u, e.v));
  std::sort(all.begin(), all.end());
  cfg.max_bad = 0.5;
  CHECK(good_walk_frequency(k6, all, cfg, 500, 3).hits == 0);
}

TEST_CASE("TSP adversary samples and separation") {
  const auto inst = lps_graph(5, 13);
  TspAdversaryConfig cfg{0, 4, 3.0, 0.75};
  Rng rng(7);
  CHECK(tsp_adversary_sample(inst.graph, 0, cfg, rng).terminals.size() <= 2);
  cfg.t = 2;
  Rng a(9), b(9);
  const auto s1 = tsp_adversary_sample(inst.graph, 0, cfg, a);
  const auto s2 = tsp_adversary_sample(inst.graph, 0, cfg, b);
  CHECK(s1.first.vertices == s2.first.vertices);
  CHECK(s1.second.vertices == s2.second.vertices);
  Rng c0 = Rng(9).split(0);
  CHECK(random_walk(inst.graph, 2, c0).vertices == s1.first.vertices);

  GraphDistance dist(inst.graph);
  TspSample same;
  same.first = walk_of({5});
  same.second = walk_of({5});
  same.x1 = same.x2 = {5};
  CHECK_FALSE(check_separation(same, dist.hop_cost(), 1).e1);

  // Start distance exactly 3t with t = 1 on the path 0-1-2-3-4.
  const Graph path = path_graph(5);
  GraphDistance pd(path);
  TspSample edge;
  edge.first = walk_of({0, 1});
  edge.second = walk_of({3, 4});
  edge.x1 = {0, 1};
  edge.x2 = {3, 4};
  const auto sep = check_separation(edge, pd.hop_cost(), 1);
  CHECK(sep.e1);
  CHECK(sep.start_distance == 3.0);
  CHECK(sep.min_cross == 2.0);
}

TEST_CASE("block alternation counts") {
  const TourOrder sigma{0, {1, 2, 3, 4, 5, 6, 7, 8}};
  const auto one = block_alternation(sigma, std::vector<Vertex>{3}, std::vector<Vertex>{4}, 4);
  CHECK(one.blocks1 == 1);
  CHECK(one.blocks2 == 1);
  CHECK(one.shared == 1);
  // l = 4 blocks of two; each set meets exactly three blocks.
  const auto three = block_alternation(sigma, std::vector<Vertex>{1, 3, 5}, std::vector<Vertex>{4, 6, 8}, 4);
  CHECK(three.blocks1 == 3);
  CHECK(three.blocks2 == 3);
  CHECK(three.e2);
  CHECK(three.shared >= 1);
  const auto cap = block_alternation(TourOrder{0, {1, 2}}, std::vector<Vertex>{1}, std::vector<Vertex>{2}, 10);
  CHECK(cap.blocks == 2);
  const auto rem = block_alternation(TourOrder{0, {1, 2, 3, 4, 5}}, std::vector<Vertex>{5}, std::vector<Vertex>{}, 2);
  CHECK(rem.block_size == 2);
  CHECK(rem.blocks1 == 1);
}

TEST_CASE("TSP certificate") {
  const Graph path = path_graph(12);
  GraphDistance pd(path);
  TspSample s;
  s.first = walk_of({0, 1});
  s.second = walk_of({4, 5});
  s.x1 = {1};
  s.x2 = {4, 5};
  s.terminals = {1, 4, 5};
  const TourOrder sigma{0, {1, 4, 5, 2, 3, 6, 7, 8, 9, 10, 11}};
  const auto blocks = block_alternation(sigma, s.x1, s.x2, 1);
  REQUIRE(blocks.shared == 1);
  const auto r = tsp_certificate(sigma, pd.hop_cost(), s, blocks, 1);
  CHECK(r.holds);
  CHECK(r.rhs == 1.0);
  CHECK(r.crossings.size() == 1);
  CHECK(r.lhs >= 1.0);

  TspSample none = s;
  none.x2 = {};
  none.second = walk_of({8});
  const auto nb = block_alternation(sigma, none.x1, none.x2, 1);
  CHECK(nb.shared == 0);
  const auto z = tsp_certificate(sigma, pd.hop_cost(), none, nb, 1);
  CHECK(z.rhs == 0.0);
  CHECK(z.holds);

  TspSample close = s;
  close.second = walk_of({2, 3});
  close.x2 = {2, 3};
  CHECK_THROWS_AS(tsp_certificate(sigma, pd.hop_cost(), close, block_alternation(sigma, close.x1, close.x2, 1), 1),
                  PreconditionError);
}

TEST_CASE("Monte Carlo on a star with SPT has ratio 1") {
  const Graph star = star_graph(9);
  SolutionDistribution d;
  d.solutions.emplace_back(shortest_path_tree(star, 0, unit_hop_cost()));
  d.weights = {1.0};
  LbConfig cfg;
  cfg.steiner = steiner_config_for(1);
  cfg.steiner.certificate_mode = false;
  cfg.diameter = 2.0;
  cfg.trials = 300;
  cfg.seed = 4;
  for (const auto& r : monte_carlo_lb(star, d, cfg)) CHECK(r.ratio == doctest::Approx(1.0));
}

TEST_CASE("Monte Carlo rows do not depend on the worker count") {
  const auto inst = lps_graph(5, 13);
  SolutionDistribution d;
  d.solutions.emplace_back(tree_to_tour(shortest_path_tree(inst.graph, 0, unit_hop_cost())));
  d.weights = {1.0};
  LbConfig cfg;
  cfg.kind = AdversaryKind::kTsp;
  cfg.tsp = TspAdversaryConfig{2, 4, 3.0, 0.75};
  cfg.girth = inst.certificate.girth;
  cfg.diameter = static_cast<Cost>(inst.certificate.diameter);
  cfg.trials = 400;
  cfg.seed = 12;
  const auto one = monte_carlo_lb(inst.graph, d, cfg);
  cfg.workers = 3;
  const auto three = monte_carlo_lb(inst.graph, d, cfg);
  REQUIRE(one.size() == three.size());
  for (std::size_t i = 0; i < one.size(); ++i) {
    CHECK(one[i].lhs == three[i].lhs);
    CHECK(one[i].ratio == three[i].ratio);
    CHECK(one[i].e1 == three[i].e1);
    CHECK(one[i].holds);
  }
}

TEST_CASE("parallel_for rethrows") {
  CHECK_THROWS_AS(parallel_for(10, 2,
                               [](std::size_t i, std::size_t) {
                                 if (i == 7) throw InvalidArgument("boom");
                               }),
                  InvalidArgument);
}
