#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "unilb/expander.hpp"
#include "unilb/graph.hpp"
#include "unilb/oracles.hpp"
#include "unilb/rng.hpp"
#include "unilb/universal.hpp"

namespace unilb {

/// Memoized BFS distances on a unit-cost graph. Not thread safe; one per worker.
class GraphDistance {
 public:
  explicit GraphDistance(const Graph& g, std::size_t max_rows = 64) : g_(&g), max_rows_(max_rows) {}
  Cost operator()(Vertex u, Vertex v);
  HopCost hop_cost() {
    return [this](Vertex u, Vertex v) { return (*this)(u, v); };
  }

 private:
  const Graph* g_;
  std::size_t max_rows_;
  std::unordered_map<Vertex, std::vector<std::uint32_t>> rows_;
};

struct SteinerAdversaryConfig {
  std::size_t t = 1;
  double max_bad = 0.125;     // at most this many F-traversals
  double min_distinct = 0.5;  // at least this many distinct walk vertices
  // Refuse t > girth / 3, where the cycle argument behind the certificate breaks.
  bool certificate_mode = true;
};

// t = floor(girth / 3), thresholds t/8 and t/2.
SteinerAdversaryConfig default_steiner_config(std::size_t girth);
SteinerAdversaryConfig steiner_config_for(std::size_t t);

struct SteinerSample {
  WalkTrace walk;
  TerminalSet terminals;
};

// X is the set of distinct walk vertices minus the root.
SteinerSample steiner_adversary_sample(const Graph& g, Vertex root, const SteinerAdversaryConfig& cfg,
                                       std::optional<std::size_t> girth, Rng& rng);

// First edges (v, v_1) of all nontrivial paths, ascending and duplicate-free.
std::vector<EdgeKey> first_edge_set(const PathCollection& p);

struct WalkQuality {
  bool good = false;
  std::size_t bad_edges = 0;  // walk steps landing on F, with multiplicity
  std::size_t distinct = 0;   // distinct walk vertices, start included
};

// `first_edges` must be sorted, as returned by first_edge_set.
WalkQuality is_good_walk(const WalkTrace& w, std::span<const EdgeKey> first_edges, const SteinerAdversaryConfig& cfg);

struct CertificateResult {
  bool holds = false;
  Cost lhs = 0.0;
  Cost rhs = 0.0;
  // Steiner witness: X', the truncated stubs and their summed cost.
  std::vector<Vertex> reduced_terminals;
  std::vector<std::vector<Vertex>> stubs;
  Cost stub_bound = 0.0;
  // Pair of X' vertices whose stubs meet, if any.
  std::optional<std::pair<Vertex, Vertex>> conflict;
  // Tour witness: one crossing leg of sigma_X per shared block.
  std::vector<std::pair<Vertex, Vertex>> crossings;
  std::string note;
};

// c(P[X]) against |X| * g / 6 for a good walk of at most g/3 steps.
// X' keeps walk vertices not incident to any F-edge the walk traverses; each
// keeps the first floor(g/3) hops of its path. holds requires the stubs to be
// pairwise vertex-disjoint and lhs >= rhs.
// Throws PreconditionError when the walk is not good or too long.
CertificateResult steiner_certificate(const PathCollection& p, const WalkTrace& w, std::size_t girth,
                                      const SteinerAdversaryConfig& cfg);
// Same, with F = first_edge_set(p) precomputed.
CertificateResult steiner_certificate(const PathCollection& p, std::span<const EdgeKey> first_edges,
                                      const WalkTrace& w, std::size_t girth, const SteinerAdversaryConfig& cfg);

// Trial i walks on the stream derive_seed(seed, i).
FrequencyEstimate good_walk_frequency(const Graph& g, std::span<const EdgeKey> first_edges,
                                      const SteinerAdversaryConfig& cfg, std::size_t trials, std::uint64_t seed);

struct TspAdversaryConfig {
  std::size_t t = 1;
  std::size_t blocks = 1;          // l
  double separation = 3.0;         // E1: start distance >= separation * t
  double alternation = 0.75;       // E2: each walk meets >= alternation * l blocks
};

// t = max(1, floor(log_d n / 4)), l = max(1, round(gamma * log_d n)).
TspAdversaryConfig default_tsp_config(std::size_t n, std::size_t d, double gamma = 1.0);

struct TspSample {
  WalkTrace first;
  WalkTrace second;
  TerminalSet x1;
  TerminalSet x2;
  TerminalSet terminals;  // x1 union x2
};

// The two walks use the child streams rng.split(0) and rng.split(1).
TspSample tsp_adversary_sample(const Graph& g, Vertex root, const TspAdversaryConfig& cfg, Rng& rng);

struct SeparationResult {
  bool e1 = false;
  Cost start_distance = 0.0;
  // Smallest distance between the two terminal sets; infinity if one is empty.
  Cost min_cross = 0.0;
};

SeparationResult check_separation(const TspSample& s, const HopCost& dist, std::size_t t, double separation = 3.0);

struct BlockStats {
  std::size_t blocks = 0;      // effective l, capped so every block is nonempty
  std::size_t block_size = 0;  // floor(N / l); the last block takes the remainder
  std::size_t blocks1 = 0;
  std::size_t blocks2 = 0;
  std::size_t shared = 0;
  std::vector<std::size_t> shared_blocks;
  bool e2 = false;
};

BlockStats block_alternation(const TourOrder& sigma, std::span<const Vertex> x1, std::span<const Vertex> x2,
                             std::size_t blocks, double alternation = 0.75);

// c(sigma_X) against shared * t. For each shared block, finds a consecutive
// pair of sigma_X inside the block with one end in x1 and the other in x2.
// Throws PreconditionError unless the sample satisfies E1.
CertificateResult tsp_certificate(const TourOrder& sigma, const HopCost& dist, const TspSample& s,
                                  const BlockStats& blocks, std::size_t t, double separation = 3.0);

/// Finite solution distribution.
struct SolutionDistribution {
  std::vector<Solution> solutions;
  std::vector<double> weights;  // nonnegative, summing to 1

  std::size_t sample(Rng& rng) const;
};

enum class AdversaryKind { kSteiner, kTsp };

struct LbTrial {
  std::size_t trial = 0;
  std::size_t solution = 0;
  std::size_t t = 0;
  std::size_t x_size = 0;
  bool good = false;
  bool e1 = false;
  bool e2 = false;
  std::size_t shared = 0;
  bool certified = false;  // a certificate was evaluated on this trial
  bool holds = true;
  Cost lhs = 0.0;          // certificate left side, or the projected cost
  Cost rhs = 0.0;          // certificate bound, 0 when not evaluated
  Cost projected = 0.0;
  Cost opt = 0.0;
  double ratio = 0.0;
  OptKind opt_kind = OptKind::kSurrogate;
};

struct LbConfig {
  AdversaryKind kind = AdversaryKind::kSteiner;
  SteinerAdversaryConfig steiner;
  TspAdversaryConfig tsp;
  Vertex root = 0;
  std::optional<std::size_t> girth;
  Cost diameter = 0.0;
  OracleBudget budget;
  // Exact Steiner opt only when 3^|X| * n stays below this; otherwise the surrogate.
  std::size_t exact_work_limit = std::size_t{1} << 26;
  std::size_t trials = 0;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

// Trial i draws from derive_seed(seed, i); rows come back in trial order and
// do not depend on the worker count.
std::vector<LbTrial> monte_carlo_lb(const Graph& g, const SolutionDistribution& dist, const LbConfig& cfg);

// Run fn(i, worker) for i in [0, count) on `workers` threads; fn must write
// only to slot i. The first exception thrown by any call is rethrown.
void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t, std::size_t)>& fn);

}  // namespace unilb
