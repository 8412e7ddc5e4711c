#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "unilb/graph.hpp"
#include "unilb/metric.hpp"

namespace unilb {

// Terminal caps count X only; the root is always added on top.
struct OracleBudget {
  std::size_t steiner_max_terminals = 12;  // |X| + 1 <= this
  std::size_t tsp_max_terminals = 14;      // |X| <= this
  std::size_t max_table_entries = std::size_t{1} << 25;
};

struct SteinerSolution {
  Cost cost = 0.0;
  // Edges of an optimal tree in the metric closure, ascending.
  std::vector<EdgeKey> edges;
};

struct TourSolution {
  Cost cost = 0.0;
  // Visiting order of the terminals; the tour starts and ends at the root.
  std::vector<Vertex> order;
};

// Dreyfus-Wagner over all points of m as Steiner candidates.
// Throws BudgetExceeded when |X| + 1 exceeds the cap or the table is too large.
SteinerSolution steiner_exact(const MetricSpace& m, std::span<const Vertex> terminals, const OracleBudget& budget = {});

// Same optimum on a unit-cost graph without materializing the metric:
// relaxation steps are bucketed BFS passes, costs are integers.
std::size_t steiner_exact_graph(const Graph& g, Vertex root, std::span<const Vertex> terminals,
                                const OracleBudget& budget = {});

// Held-Karp on the (|X|+1)-point submetric with the root fixed as start and end.
TourSolution tsp_exact(const MetricSpace& m, std::span<const Vertex> terminals, const OracleBudget& budget = {});

// Held-Karp on an explicit symmetric distance matrix; index 0 is the root and
// the returned order holds indices 1..k-1.
TourSolution tsp_exact_matrix(std::span<const Cost> dist, std::size_t k, const OracleBudget& budget = {});

// Upper bounds on opt built from the walks that produced X.
// Steiner: the walk plus one connection to the root, t + diameter.
// Tour: root to walk 1, along walk 1, across to walk 2, along walk 2, back
// to the root, t1 + t2 + 3 * diameter.
Cost steiner_surrogate(std::size_t t, Cost diameter);
Cost tsp_surrogate(std::size_t t1, std::size_t t2, Cost diameter);

// Tag stored next to each ratio: which denominator was used.
enum class OptKind { kExact, kSurrogate };
std::string to_string(OptKind kind);

}  // namespace unilb
