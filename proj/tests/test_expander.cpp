#include <Eigen/Dense>
#include <cmath>

#include "doctest.h"
#include "support.hpp"
#include "unilb/error.hpp"
#include "unilb/expander.hpp"

using namespace unilb;
using namespace unilb::testing;

namespace {

// Dense-eigensolver oracle: largest |lambda| / d over the spectrum with the
// trivial d (and -d for bipartite graphs) removed once each.
double dense_beta(const Graph& g) {
  const auto n = static_cast<Eigen::Index>(g.num_vertices());
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(n, n);
  for (const Edge& e : g.edges()) {
    a(e.u, e.v) += 1.0;
    if (e.u != e.v) a(e.v, e.u) += 1.0;
  }
  const double d = static_cast<double>(*g.regular_degree());
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(a);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + n);
  std::sort(ev.begin(), ev.end());
  ev.pop_back();  // d
  if (bipartition(g)) ev.erase(ev.begin());  // -d
  double best = 0.0;
  for (double x : ev) best = std::max(best, std::abs(x));
  return best / d;
}

}  // namespace

TEST_CASE("second eigenvalue matches a dense eigensolver") {
  CHECK(second_eigenvalue(complete_graph(4)) == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
  CHECK(second_eigenvalue(cycle_graph(6)) == doctest::Approx(0.5).epsilon(1e-6));
  CHECK(dense_beta(cycle_graph(6)) == doctest::Approx(0.5).epsilon(1e-9));
  CHECK(second_eigenvalue(petersen_graph()) == doctest::Approx(dense_beta(petersen_graph())).epsilon(1e-6));
  CHECK(second_eigenvalue(wagner_graph()) == doctest::Approx(dense_beta(wagner_graph())).epsilon(1e-6));
  const Graph r = random_regular(80, 5, 17);
  CHECK(second_eigenvalue(r) == doctest::Approx(dense_beta(r)).epsilon(1e-5));
  const Graph b = random_regular(60, 4, 3);
  CHECK(second_eigenvalue(b) == doctest::Approx(dense_beta(b)).epsilon(1e-5));
}

TEST_CASE("prime and residue helpers") {
  CHECK(is_prime(13));
  CHECK_FALSE(is_prime(15));
  CHECK_FALSE(is_prime(1));
  // Squares mod 13 are {1,3,4,9,10,12}.
  for (int a = 1; a < 13; ++a) {
    const bool square = a == 1 || a == 3 || a == 4 || a == 9 || a == 10 || a == 12;
    CHECK(legendre(a, 13) == (square ? 1 : -1));
  }
  CHECK(legendre(26, 13) == 0);
}

TEST_CASE("LPS graph on (5,13)") {
  const auto inst = lps_graph(5, 13);
  const auto& c = inst.certificate;
  CHECK(c.n == 2184);
  CHECK(c.d == 6);
  CHECK(inst.graph.regular_degree() == 6);
  CHECK(inst.graph.is_simple());
  CHECK(inst.graph.is_connected());
  CHECK(c.girth == 8);
  CHECK(c.diameter == 7);
  REQUIRE(c.ramanujan_bound.has_value());
  CHECK(*c.ramanujan_bound == doctest::Approx(2.0 * std::sqrt(5.0) / 6.0));
  CHECK(c.beta <= *c.ramanujan_bound + 1e-9);
  CHECK(c.to_json().find("\"n\"") != std::string::npos);
}

TEST_CASE("LPS graph with a quadratic-residue generator prime") {
  // 13 is a square mod 17 (8^2 = 64 = 13), so the group is PSL(2,17).
  const auto inst = lps_graph(13, 17);
  CHECK(inst.certificate.n == (17 * 17 * 17 - 17) / 2);
  CHECK(inst.graph.regular_degree() == 14);
  CHECK(inst.certificate.beta <= *inst.certificate.ramanujan_bound + 1e-9);
}

TEST_CASE("LPS parameter validation") {
  CHECK_THROWS_AS(lps_graph(4, 13), InvalidArgument);
  CHECK_THROWS_AS(lps_graph(5, 5), InvalidArgument);
  CHECK_THROWS_AS(lps_graph(3, 13), InvalidArgument);  // p must be 1 mod 4
}

TEST_CASE("random regular graphs") {
  const Graph k4 = random_regular(4, 3, 1);
  CHECK(k4.num_edges() == 6);
  CHECK(k4.is_simple());
  const Graph c = random_regular(6, 2, 5);
  CHECK(c.regular_degree() == 2);
  CHECK(c.is_simple());
  CHECK(c.num_edges() == 6);
  CHECK(random_regular(50, 4, 9).edges() == random_regular(50, 4, 9).edges());
  CHECK_THROWS_AS(random_regular(5, 3, 1), InvalidArgument);  // odd n*d
  const Graph big = random_regular(1024, 10, 2024);
  CHECK(second_eigenvalue(big) < 0.9);
}

TEST_CASE("random walks") {
  const Graph k2 = complete_graph(2);
  Rng rng(4);
  const WalkTrace w = random_walk(k2, 3, rng);
  REQUIRE(w.vertices.size() == 4);
  CHECK(w.vertices[0] != w.vertices[1]);
  CHECK(w.vertices[0] == w.vertices[2]);
  CHECK(w.vertices[1] == w.vertices[3]);
  const WalkTrace z = random_walk(petersen_graph(), 0, rng);
  CHECK(z.vertices.size() == 1);
  CHECK(z.steps() == 0);
  const WalkTrace long_walk = random_walk(petersen_graph(), 50, rng);
  CHECK(is_valid_walk(petersen_graph(), long_walk));
  CHECK(long_walk.distinct_vertices().size() <= 10);
}

TEST_CASE("confinement statistics") {
  const Graph k4 = complete_graph(4);
  const double beta = second_eigenvalue(k4);
  const auto all = walk_confinement_stats(k4, std::vector<bool>(4, true), 3, beta, 500, 1);
  CHECK(all.estimate.frequency == 1.0);
  CHECK(all.bound >= 1.0);
  std::vector<bool> one(4, false);
  one[2] = true;
  const auto single = walk_confinement_stats(k4, one, 2, beta, 2000, 1);
  CHECK(single.estimate.hits == 0);
  CHECK(single.within_bound());
}

TEST_CASE("visit statistics") {
  const Graph pet = petersen_graph();
  const double beta = second_eigenvalue(pet);
  std::vector<bool> some(10, false);
  some[0] = some[1] = true;
  const auto zero_gamma = walk_visit_stats(pet, some, 4, 0.0, beta, 2000, 5);
  CHECK(zero_gamma.positions.frequency < 1.0);
  CHECK(zero_gamma.bound == doctest::Approx(16.0));
  const auto empty = walk_visit_stats(pet, std::vector<bool>(10, false), 4, 0.5, beta, 500, 5);
  CHECK(empty.positions.hits == 0);
  CHECK(empty.distinct.hits == 0);
}

TEST_CASE("frequency estimate standard error") {
  const auto e = make_estimate(100, 25);
  CHECK(e.frequency == doctest::Approx(0.25));
  CHECK(e.sigma == doctest::Approx(std::sqrt(0.25 * 0.75 / 100.0)));
  CHECK(make_estimate(0, 0).frequency == 0.0);
}
