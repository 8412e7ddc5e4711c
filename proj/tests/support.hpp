#pragma once

// Small graph builders and brute-force oracles shared by the test binaries.
// The oracles are deliberately naive and independent of the library's solvers.

#include <algorithm>
#include <cstddef>
#include <limits>
#include <numeric>
#include <vector>

#include "unilb/graph.hpp"
#include "unilb/metric.hpp"

namespace unilb::testing {

inline Graph make_graph(std::size_t n, const std::vector<std::pair<Vertex, Vertex>>& edges) {
  std::vector<Edge> es;
  for (auto [a, b] : edges) es.push_back({a, b});
  return Graph(n, std::move(es));
}

inline Graph path_graph(std::size_t n) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (Vertex v = 0; v + 1 < n; ++v) e.emplace_back(v, v + 1);
  return make_graph(n, e);
}

inline Graph cycle_graph(std::size_t n) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (Vertex v = 0; v < n; ++v) e.emplace_back(v, static_cast<Vertex>((v + 1) % n));
  return make_graph(n, e);
}

inline Graph complete_graph(std::size_t n) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (Vertex a = 0; a < n; ++a) {
    for (Vertex b = a + 1; b < n; ++b) e.emplace_back(a, b);
  }
  return make_graph(n, e);
}

// Center 0, leaves 1..n-1.
inline Graph star_graph(std::size_t n) {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (Vertex v = 1; v < n; ++v) e.emplace_back(0, v);
  return make_graph(n, e);
}

inline Graph petersen_graph() {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (Vertex i = 0; i < 5; ++i) {
    e.emplace_back(i, (i + 1) % 5);          // outer cycle
    e.emplace_back(i, i + 5);                // spokes
    e.emplace_back(i + 5, (i + 2) % 5 + 5);  // inner pentagram
  }
  return make_graph(10, e);
}

// 8-cycle plus the four long diagonals.
inline Graph wagner_graph() {
  std::vector<std::pair<Vertex, Vertex>> e;
  for (Vertex i = 0; i < 8; ++i) e.emplace_back(i, (i + 1) % 8);
  for (Vertex i = 0; i < 4; ++i) e.emplace_back(i, i + 4);
  return make_graph(8, e);
}

// Cost of the labeled tree on points[0..k) encoded by a Prufer sequence.
inline Cost prufer_tree_cost(const MetricSpace& m, const std::vector<Vertex>& points, const std::vector<std::size_t>& seq) {
  const std::size_t k = points.size();
  std::vector<std::size_t> degree(k, 1);
  for (std::size_t s : seq) ++degree[s];
  Cost cost = 0.0;
  for (std::size_t s : seq) {
    std::size_t leaf = 0;
    while (degree[leaf] != 1) ++leaf;
    cost += m(points[leaf], points[s]);
    --degree[leaf];
    --degree[s];
  }
  std::size_t a = k, b = k;
  for (std::size_t i = 0; i < k; ++i) {
    if (degree[i] == 1) (a == k ? a : b) = i;
  }
  return cost + m(points[a], points[b]);
}

// Cheapest labeled tree spanning exactly `points`, by enumerating all k^(k-2) trees.
inline Cost min_tree_by_enumeration(const MetricSpace& m, const std::vector<Vertex>& points) {
  const std::size_t k = points.size();
  if (k <= 1) return 0.0;
  if (k == 2) return m(points[0], points[1]);
  std::vector<std::size_t> seq(k - 2, 0);
  Cost best = std::numeric_limits<Cost>::infinity();
  while (true) {
    best = std::min(best, prufer_tree_cost(m, points, seq));
    std::size_t i = 0;
    while (i < seq.size() && ++seq[i] == k) seq[i++] = 0;
    if (i == seq.size()) break;
  }
  return best;
}

// Steiner optimum for X plus root: min over supersets W of the cheapest tree on W.
inline Cost brute_steiner(const MetricSpace& m, const std::vector<Vertex>& terminals) {
  const std::size_t n = m.size();
  std::vector<bool> required(n, false);
  required[m.root()] = true;
  for (Vertex x : terminals) required[x] = true;
  Cost best = std::numeric_limits<Cost>::infinity();
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    std::vector<Vertex> pts;
    bool ok = true;
    for (Vertex v = 0; v < n; ++v) {
      const bool in = (mask >> v & 1) != 0;
      if (required[v] && !in) ok = false;
      if (in) pts.push_back(v);
    }
    if (ok) best = std::min(best, min_tree_by_enumeration(m, pts));
  }
  return best;
}

// Tour optimum through root and terminals by trying every order.
inline Cost brute_tsp(const MetricSpace& m, std::vector<Vertex> terminals) {
  terminals.erase(std::remove(terminals.begin(), terminals.end(), m.root()), terminals.end());
  std::sort(terminals.begin(), terminals.end());
  terminals.erase(std::unique(terminals.begin(), terminals.end()), terminals.end());
  if (terminals.empty()) return 0.0;
  Cost best = std::numeric_limits<Cost>::infinity();
  do {
    Cost c = m(m.root(), terminals.front()) + m(terminals.back(), m.root());
    for (std::size_t i = 0; i + 1 < terminals.size(); ++i) c += m(terminals[i], terminals[i + 1]);
    best = std::min(best, c);
  } while (std::next_permutation(terminals.begin(), terminals.end()));
  return best;
}

}  // namespace unilb::testing
