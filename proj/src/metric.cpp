#include "unilb/metric.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <functional>
#include <istream>
#include <limits>
#include <ostream>
#include <queue>

#include <fmt/format.h>

#include "unilb/error.hpp"

namespace unilb {

MetricSpace::MetricSpace(std::size_t n, Vertex root, std::vector<Cost> table)
    : n_(n), root_(root), table_(std::move(table)) {
  if (table_.size() != n_ * n_) {
    throw InvalidArgument(fmt::format("metric: table has {} entries, expected {}", table_.size(), n_ * n_));
  }
  if (n_ > 0 && root_ >= n_) throw InvalidArgument(fmt::format("metric: root {} outside [0, {})", root_, n_));
  for (Cost c : table_) {
    if (!(c >= 0.0) || !std::isfinite(c)) throw InvalidArgument("metric: distances must be finite and nonnegative");
  }
}

MetricSpace MetricSpace::with_root(Vertex root) const { return MetricSpace(n_, root, table_); }

MetricSpace shortest_path_metric(const Graph& g, Vertex root) {
  const std::size_t n = g.num_vertices();
  if (n > 0 && root >= n) throw InvalidArgument("shortest_path_metric: root out of range");
  std::vector<Cost> table(n * n);
  for (Vertex s = 0; s < n; ++s) {
    const auto dist = bfs_distances(g, s);
    for (Vertex v = 0; v < n; ++v) {
      if (dist[v] == kUnreachable) {
        throw InvalidArgument(fmt::format("shortest_path_metric: graph is disconnected ({} cannot reach {})", s, v));
      }
      table[static_cast<std::size_t>(s) * n + v] = dist[v];
    }
  }
  return MetricSpace(n, root, std::move(table));
}

MetricSpace shortest_path_metric(const Graph& g, std::span<const Cost> edge_costs, Vertex root) {
  const std::size_t n = g.num_vertices();
  if (edge_costs.size() != g.num_edges()) throw InvalidArgument("shortest_path_metric: one cost per edge required");
  if (n > 0 && root >= n) throw InvalidArgument("shortest_path_metric: root out of range");
  std::vector<std::vector<std::pair<Vertex, Cost>>> adj(n);
  for (std::size_t i = 0; i < g.num_edges(); ++i) {
    const Edge& e = g.edges()[i];
    if (!(edge_costs[i] > 0.0)) throw InvalidArgument("shortest_path_metric: edge costs must be positive");
    adj[e.u].emplace_back(e.v, edge_costs[i]);
    adj[e.v].emplace_back(e.u, edge_costs[i]);
  }
  constexpr Cost kInf = std::numeric_limits<Cost>::infinity();
  std::vector<Cost> table(n * n, kInf);
  using Item = std::pair<Cost, Vertex>;
  for (Vertex s = 0; s < n; ++s) {
    Cost* dist = table.data() + static_cast<std::size_t>(s) * n;
    std::priority_queue<Item, std::vector<Item>, std::greater<>> heap;
    dist[s] = 0;
    heap.emplace(0.0, s);
    while (!heap.empty()) {
      const auto [d, u] = heap.top();
      heap.pop();
      if (d > dist[u]) continue;
      for (const auto& [w, c] : adj[u]) {
        if (d + c < dist[w]) {
          dist[w] = d + c;
          heap.emplace(dist[w], w);
        }
      }
    }
    for (Vertex v = 0; v < n; ++v) {
      if (dist[v] == kInf) {
        throw InvalidArgument(fmt::format("shortest_path_metric: graph is disconnected ({} cannot reach {})", s, v));
      }
    }
  }
  return MetricSpace(n, root, std::move(table));
}

Cost diameter(const MetricSpace& m) {
  const auto& t = m.table();
  return t.empty() ? 0.0 : *std::max_element(t.begin(), t.end());
}

MetricSpace random_metric(std::size_t n, Vertex root, std::uint32_t max_weight, Rng& rng) {
  if (max_weight == 0) throw InvalidArgument("random_metric: max_weight must be positive");
  std::vector<Cost> d(n * n, 0.0);
  for (std::size_t a = 0; a < n; ++a) {
    for (std::size_t b = a + 1; b < n; ++b) {
      d[a * n + b] = d[b * n + a] = static_cast<Cost>(1 + rng.uniform_below(max_weight));
    }
  }
  for (std::size_t k = 0; k < n; ++k) {
    for (std::size_t a = 0; a < n; ++a) {
      for (std::size_t b = 0; b < n; ++b) d[a * n + b] = std::min(d[a * n + b], d[a * n + k] + d[k * n + b]);
    }
  }
  return MetricSpace(n, root, std::move(d));
}

std::string MetricViolation::describe() const {
  const auto [u, v, w] = vertices;
  switch (kind) {
    case MetricViolationKind::kNonzeroDiagonal:
      return fmt::format("dist({0},{0}) is nonzero", u);
    case MetricViolationKind::kAsymmetric:
      return fmt::format("dist({0},{1}) != dist({1},{0})", u, v);
    case MetricViolationKind::kZeroOffDiagonal:
      return fmt::format("dist({},{}) is zero for distinct points", u, v);
    case MetricViolationKind::kTriangle:
      return fmt::format("dist({0},{2}) > dist({0},{1}) + dist({1},{2})", u, v, w);
  }
  return "unknown violation";
}

std::optional<MetricViolation> validate_metric(const MetricSpace& m, double tol) {
  const auto n = static_cast<Vertex>(m.size());
  for (Vertex u = 0; u < n; ++u) {
    if (m(u, u) > tol) return MetricViolation{MetricViolationKind::kNonzeroDiagonal, {u, u, u}};
    for (Vertex v = u + 1; v < n; ++v) {
      if (std::abs(m(u, v) - m(v, u)) > tol) return MetricViolation{MetricViolationKind::kAsymmetric, {u, v, v}};
      if (m(u, v) <= tol) return MetricViolation{MetricViolationKind::kZeroOffDiagonal, {u, v, v}};
    }
  }
  for (Vertex u = 0; u < n; ++u) {
    const auto du = m.row(u);
    for (Vertex v = 0; v < n; ++v) {
      const auto dv = m.row(v);
      for (Vertex w = 0; w < n; ++w) {
        if (du[w] > du[v] + dv[w] + tol) return MetricViolation{MetricViolationKind::kTriangle, {u, v, w}};
      }
    }
  }
  return std::nullopt;
}

MetricSpace read_metric(std::istream& in) {
  std::size_t n = 0;
  long long root = 0;
  if (!(in >> n >> root)) throw InvalidArgument("metric file: expected header 'n root'");
  if (root < 0 || (n > 0 && static_cast<std::size_t>(root) >= n)) {
    throw InvalidArgument("metric file: root out of range");
  }
  std::vector<Cost> table(n * n);
  for (std::size_t i = 0; i < n * n; ++i) {
    if (!(in >> table[i])) throw InvalidArgument(fmt::format("metric file: row {} is short", i / n + 1));
  }
  return MetricSpace(n, static_cast<Vertex>(root), std::move(table));
}

void write_metric(std::ostream& out, const MetricSpace& m) {
  out << m.size() << ' ' << m.root() << '\n';
  for (Vertex u = 0; u < m.size(); ++u) {
    const auto row = m.row(u);
    for (std::size_t v = 0; v < row.size(); ++v) {
      if (v > 0) out << ' ';
      out << fmt::format("{}", row[v]);
    }
    out << '\n';
  }
}

MetricSpace load_metric(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument(fmt::format("cannot open metric file '{}'", path));
  return read_metric(in);
}

void save_metric(const std::string& path, const MetricSpace& m) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument(fmt::format("cannot write metric file '{}'", path));
  write_metric(out, m);
}

}  // namespace unilb
