#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "unilb/graph.hpp"
#include "unilb/rng.hpp"

namespace unilb {

enum class ExpanderKind { kLps, kRandomRegular };

std::string to_string(ExpanderKind kind);

/// Measured (n, d, beta) triple plus girth and diameter of a regular graph.
///
/// beta is |lambda_2| / d for the adjacency matrix after deflating the
/// trivial eigenvalue d (and -d when the graph is bipartite).
struct ExpanderCertificate {
  std::size_t n = 0;
  std::size_t d = 0;
  double beta = 1.0;
  std::optional<std::size_t> girth;
  std::size_t diameter = 0;
  ExpanderKind kind = ExpanderKind::kLps;
  bool bipartite = false;
  bool simple = true;
  // LPS parameters; zero for other constructions.
  std::uint32_t p = 0;
  std::uint32_t q = 0;
  // 2*sqrt(p)/(p+1) for LPS, the Ramanujan bound on beta; unset otherwise.
  std::optional<double> ramanujan_bound;
  std::uint64_t seed = 0;

  // Emitted alongside generated graph files.
  std::string to_json() const;
};

struct ExpanderInstance {
  Graph graph;
  ExpanderCertificate certificate;
};

struct EigenOptions {
  double tol = 1e-9;
  std::size_t max_iterations = 200000;
  std::uint64_t seed = 0x5eed;
};

// |lambda_2| / d by power iteration with deflation of the all-ones vector and,
// for bipartite graphs, the alternating vector. Requires a connected regular
// graph; throws BudgetExceeded if the estimate does not settle.
double second_eigenvalue(const Graph& g, const EigenOptions& opts = {});

// Whether n is prime (trial division; desk-scale inputs only).
bool is_prime(std::uint64_t n);

// Legendre symbol (a/q) for an odd prime q: 1, -1, or 0.
int legendre(std::int64_t a, std::uint64_t q);

// Cayley graph of PSL(2,q) or PGL(2,q) on the p+1 LPS generators.
// Vertex 0 is the identity. Girth and diameter are read off a single BFS
// from the identity (Cayley graphs are vertex-transitive).
ExpanderInstance lps_graph(std::uint32_t p, std::uint32_t q, const EigenOptions& opts = {});

// Connected simple d-regular graph by incremental stub pairing: pairs that
// would form a loop or a repeated edge are redrawn, dead ends restart.
// Approximately uniform for d much smaller than n.
Graph random_regular(std::size_t n, std::size_t d, std::uint64_t seed, std::size_t max_attempts = 10000);

// Certificate for an arbitrary connected regular graph (all-sources girth and
// diameter).
ExpanderCertificate certify_regular_graph(const Graph& g, ExpanderKind kind, const EigenOptions& opts = {});

/// Ordered vertices of a walk; edges are consecutive vertex pairs.
struct WalkTrace {
  std::vector<Vertex> vertices;
  std::uint64_t seed = 0;

  std::size_t steps() const noexcept { return vertices.empty() ? 0 : vertices.size() - 1; }
  Edge edge(std::size_t i) const noexcept { return {vertices[i], vertices[i + 1]}; }
  std::vector<Edge> edges() const;
  // Distinct vertices, ascending.
  std::vector<Vertex> distinct_vertices() const;
};

// t-step walk with a uniform start and uniform neighbor steps.
WalkTrace random_walk(const Graph& g, std::size_t t, Rng& rng);

// Whether consecutive vertices are adjacent in g.
bool is_valid_walk(const Graph& g, const WalkTrace& w);

struct FrequencyEstimate {
  std::size_t trials = 0;
  std::size_t hits = 0;
  double frequency = 0.0;
  // Binomial standard error of the frequency.
  double sigma = 0.0;
};

FrequencyEstimate make_estimate(std::size_t trials, std::size_t hits);

struct ConfinementStats {
  FrequencyEstimate estimate;
  double alpha = 0.0;  // |B| / n
  double bound = 0.0;  // (alpha + beta)^t
  bool within_bound(double sigmas = 3.0) const { return estimate.frequency <= bound + sigmas * estimate.sigma; }
};

// Monte Carlo estimate of Pr[a t-step walk stays inside B]. `in_set` marks B.
// Trial i uses the stream derive_seed(seed, i).
ConfinementStats walk_confinement_stats(const Graph& g, const std::vector<bool>& in_set, std::size_t t, double beta,
                                        std::size_t trials, std::uint64_t seed);

struct VisitStats {
  // Event: more than gamma*t walk positions (with multiplicity) lie in B.
  FrequencyEstimate positions;
  // Event: more than gamma*t distinct walk vertices lie in B.
  FrequencyEstimate distinct;
  double alpha = 0.0;
  double bound = 0.0;  // 2^t (alpha + beta)^(gamma t)
  bool within_bound(double sigmas = 3.0) const { return positions.frequency <= bound + sigmas * positions.sigma; }
};

VisitStats walk_visit_stats(const Graph& g, const std::vector<bool>& in_set, std::size_t t, double gamma, double beta,
                            std::size_t trials, std::uint64_t seed);

}  // namespace unilb
