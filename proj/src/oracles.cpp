#include "unilb/oracles.hpp"

#include <algorithm>
#include <cstdint>
#include <deque>
#include <limits>

#include <fmt/format.h>

#include "unilb/error.hpp"
#include "unilb/universal.hpp"

namespace unilb {

namespace {

constexpr Cost kInf = std::numeric_limits<Cost>::infinity();

void check_table(std::size_t subsets, std::size_t width, const OracleBudget& budget, const char* who) {
  if (width != 0 && subsets > budget.max_table_entries / width) {
    throw BudgetExceeded(fmt::format("{}: table of {} x {} entries exceeds the memory guard", who, subsets, width));
  }
}

void check_points(std::span<const Vertex> terminals, std::size_t n) {
  for (Vertex x : terminals) {
    if (x >= n) throw InvalidArgument(fmt::format("oracle: terminal {} out of range", x));
  }
}

// Back-pointer encoding for the metric table.
constexpr std::int64_t kBase = -1;
std::int64_t relaxed_from(Vertex u) { return -2 - static_cast<std::int64_t>(u); }

}  // namespace

SteinerSolution steiner_exact(const MetricSpace& m, std::span<const Vertex> terminals, const OracleBudget& budget) {
  const std::size_t n = m.size();
  check_points(terminals, n);
  const TerminalSet terms = make_terminal_set({terminals.begin(), terminals.end()}, m.root());
  const std::size_t k = terms.size();
  if (k == 0) return {};
  if (k + 1 > budget.steiner_max_terminals) {
    throw BudgetExceeded(fmt::format("steiner_exact: {} terminals plus root exceed the cap {}", k,
                                     budget.steiner_max_terminals));
  }
  const std::size_t subsets = std::size_t{1} << k;
  check_table(subsets, n, budget, "steiner_exact");

  std::vector<Cost> dp(subsets * n, kInf);
  std::vector<std::int64_t> back(subsets * n, kBase);
  std::vector<bool> done(n);
  for (std::size_t s = 1; s < subsets; ++s) {
    Cost* row = dp.data() + s * n;
    std::int64_t* brow = back.data() + s * n;
    if ((s & (s - 1)) == 0) {
      const auto i = static_cast<std::size_t>(__builtin_ctzll(s));
      row[terms[i]] = 0.0;
    } else {
      const std::size_t low = s & (~s + 1);
      for (std::size_t a = (s - 1) & s; a > 0; a = (a - 1) & s) {
        if ((a & low) == 0) continue;
        const Cost* ra = dp.data() + a * n;
        const Cost* rb = dp.data() + (s ^ a) * n;
        for (std::size_t v = 0; v < n; ++v) {
          const Cost c = ra[v] + rb[v];
          if (c < row[v]) {
            row[v] = c;
            brow[v] = static_cast<std::int64_t>(a);
          }
        }
      }
    }
    // Dense Dijkstra: closes the row under hops of the full point set.
    std::fill(done.begin(), done.end(), false);
    for (std::size_t round = 0; round < n; ++round) {
      std::size_t u = n;
      for (std::size_t v = 0; v < n; ++v) {
        if (!done[v] && (u == n || row[v] < row[u])) u = v;
      }
      if (u == n || row[u] == kInf) break;
      done[u] = true;
      const auto du = m.row(static_cast<Vertex>(u));
      for (std::size_t v = 0; v < n; ++v) {
        if (!done[v] && row[u] + du[v] < row[v]) {
          row[v] = row[u] + du[v];
          brow[v] = relaxed_from(static_cast<Vertex>(u));
        }
      }
    }
  }

  SteinerSolution sol;
  const std::size_t full = subsets - 1;
  sol.cost = dp[full * n + m.root()];
  std::vector<std::pair<std::size_t, Vertex>> stack{{full, m.root()}};
  while (!stack.empty()) {
    const auto [s, v] = stack.back();
    stack.pop_back();
    const std::int64_t b = back[s * n + v];
    if (b == kBase) continue;
    if (b < kBase) {
      const auto u = static_cast<Vertex>(-2 - b);
      sol.edges.push_back(edge_key(u, v));
      stack.emplace_back(s, u);
    } else {
      const auto a = static_cast<std::size_t>(b);
      stack.emplace_back(a, v);
      stack.emplace_back(s ^ a, v);
    }
  }
  std::sort(sol.edges.begin(), sol.edges.end());
  sol.edges.erase(std::unique(sol.edges.begin(), sol.edges.end()), sol.edges.end());
  return sol;
}

std::size_t steiner_exact_graph(const Graph& g, Vertex root, std::span<const Vertex> terminals,
                                const OracleBudget& budget) {
  const std::size_t n = g.num_vertices();
  if (root >= n) throw InvalidArgument("steiner_exact_graph: root out of range");
  check_points(terminals, n);
  const TerminalSet terms = make_terminal_set({terminals.begin(), terminals.end()}, root);
  const std::size_t k = terms.size();
  if (k == 0) return 0;
  if (k + 1 > budget.steiner_max_terminals) {
    throw BudgetExceeded(fmt::format("steiner_exact_graph: {} terminals plus root exceed the cap {}", k,
                                     budget.steiner_max_terminals));
  }
  const std::size_t subsets = std::size_t{1} << k;
  check_table(subsets, n, budget, "steiner_exact_graph");

  constexpr std::uint32_t kFar = std::numeric_limits<std::uint32_t>::max() / 2;
  std::vector<std::uint32_t> dp(subsets * n, kFar);
  std::vector<std::pair<std::uint32_t, Vertex>> seeds;
  std::vector<std::size_t> count;
  std::deque<Vertex> wave;
  for (std::size_t s = 1; s < subsets; ++s) {
    std::uint32_t* row = dp.data() + s * n;
    if ((s & (s - 1)) == 0) {
      row[terms[static_cast<std::size_t>(__builtin_ctzll(s))]] = 0;
    } else {
      const std::size_t low = s & (~s + 1);
      for (std::size_t a = (s - 1) & s; a > 0; a = (a - 1) & s) {
        if ((a & low) == 0) continue;
        const std::uint32_t* ra = dp.data() + a * n;
        const std::uint32_t* rb = dp.data() + (s ^ a) * n;
        for (std::size_t v = 0; v < n; ++v) row[v] = std::min(row[v], ra[v] + rb[v]);
      }
    }
    // Multi-source BFS: seeds counting-sorted by value, merged with a FIFO
    // whose values are nondecreasing, so each vertex settles at its final value.
    std::uint32_t top = 0;
    for (std::size_t v = 0; v < n; ++v) {
      if (row[v] < kFar) top = std::max(top, row[v]);
    }
    count.assign(static_cast<std::size_t>(top) + 2, 0);
    for (std::size_t v = 0; v < n; ++v) {
      if (row[v] < kFar) ++count[row[v] + 1];
    }
    for (std::size_t i = 1; i < count.size(); ++i) count[i] += count[i - 1];
    seeds.resize(count.back());
    for (Vertex v = 0; v < n; ++v) {
      if (row[v] < kFar) seeds[count[row[v]]++] = {row[v], v};
    }
    wave.clear();
    std::size_t next_seed = 0;
    while (next_seed < seeds.size() || !wave.empty()) {
      Vertex u = 0;
      if (wave.empty() || (next_seed < seeds.size() && seeds[next_seed].first <= row[wave.front()])) {
        const auto [val, v] = seeds[next_seed++];
        if (val > row[v]) continue;
        u = v;
      } else {
        u = wave.front();
        wave.pop_front();
      }
      for (Vertex w : g.neighbors(u)) {
        if (row[u] + 1 < row[w]) {
          row[w] = row[u] + 1;
          wave.push_back(w);
        }
      }
    }
  }
  const std::uint32_t best = dp[(subsets - 1) * n + root];
  if (best >= kFar) throw PreconditionError("steiner_exact_graph: terminals are not connected to the root");
  return best;
}

TourSolution tsp_exact_matrix(std::span<const Cost> dist, std::size_t k, const OracleBudget& budget) {
  if (dist.size() != k * k) throw InvalidArgument("tsp_exact_matrix: matrix shape mismatch");
  if (k <= 1) return {};
  const std::size_t t = k - 1;
  if (t > budget.tsp_max_terminals) {
    throw BudgetExceeded(fmt::format("tsp_exact: {} terminals exceed the cap {}", t, budget.tsp_max_terminals));
  }
  const std::size_t subsets = std::size_t{1} << t;
  check_table(subsets, t, budget, "tsp_exact");
  auto d = [&](std::size_t a, std::size_t b) { return dist[a * k + b]; };

  // dp[mask][j]: cheapest root path through mask ending at terminal j (index j+1).
  std::vector<Cost> dp(subsets * t, kInf);
  std::vector<std::uint8_t> prev(subsets * t, 0xff);
  for (std::size_t j = 0; j < t; ++j) dp[(std::size_t{1} << j) * t + j] = d(0, j + 1);
  for (std::size_t mask = 1; mask < subsets; ++mask) {
    for (std::size_t j = 0; j < t; ++j) {
      const Cost cur = dp[mask * t + j];
      if (!(mask >> j & 1) || cur == kInf) continue;
      for (std::size_t nx = 0; nx < t; ++nx) {
        if (mask >> nx & 1) continue;
        const std::size_t nm = mask | (std::size_t{1} << nx);
        const Cost c = cur + d(j + 1, nx + 1);
        if (c < dp[nm * t + nx]) {
          dp[nm * t + nx] = c;
          prev[nm * t + nx] = static_cast<std::uint8_t>(j);
        }
      }
    }
  }
  const std::size_t full = subsets - 1;
  TourSolution sol;
  sol.cost = kInf;
  std::size_t last = 0;
  for (std::size_t j = 0; j < t; ++j) {
    const Cost c = dp[full * t + j] + d(j + 1, 0);
    if (c < sol.cost) {
      sol.cost = c;
      last = j;
    }
  }
  std::size_t mask = full;
  while (mask != 0) {
    sol.order.push_back(static_cast<Vertex>(last + 1));
    const std::uint8_t p = prev[mask * t + last];
    mask ^= std::size_t{1} << last;
    last = p;
  }
  std::reverse(sol.order.begin(), sol.order.end());
  return sol;
}

TourSolution tsp_exact(const MetricSpace& m, std::span<const Vertex> terminals, const OracleBudget& budget) {
  check_points(terminals, m.size());
  const TerminalSet terms = make_terminal_set({terminals.begin(), terminals.end()}, m.root());
  std::vector<Vertex> pts{m.root()};
  pts.insert(pts.end(), terms.begin(), terms.end());
  const std::size_t k = pts.size();
  if (k - 1 > budget.tsp_max_terminals) {
    throw BudgetExceeded(fmt::format("tsp_exact: {} terminals exceed the cap {}", k - 1, budget.tsp_max_terminals));
  }
  std::vector<Cost> dist(k * k);
  for (std::size_t a = 0; a < k; ++a) {
    for (std::size_t b = 0; b < k; ++b) dist[a * k + b] = m(pts[a], pts[b]);
  }
  TourSolution sol = tsp_exact_matrix(dist, k, budget);
  for (Vertex& v : sol.order) v = pts[v];
  return sol;
}

Cost steiner_surrogate(std::size_t t, Cost diameter) { return static_cast<Cost>(t) + diameter; }

Cost tsp_surrogate(std::size_t t1, std::size_t t2, Cost diameter) {
  return static_cast<Cost>(t1 + t2) + 3.0 * diameter;
}

std::string to_string(OptKind kind) { return kind == OptKind::kExact ? "exact" : "surrogate"; }

}  // namespace unilb
