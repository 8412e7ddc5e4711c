#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "unilb/graph.hpp"
#include "unilb/rng.hpp"

namespace unilb {

// Comparison slack for non-integral metrics (FRT test metrics). Unit-cost
// graph metrics hold small integers, which doubles represent exactly.
inline constexpr double kMetricTolerance = 1e-9;

/// Dense n×n distance table with a distinguished root.
///
/// Construction checks shape and non-negativity only; the metric axioms are
/// checked by validate_metric() so that broken tables can still be inspected.
class MetricSpace {
 public:
  MetricSpace() = default;
  MetricSpace(std::size_t n, Vertex root, std::vector<Cost> table);

  std::size_t size() const noexcept { return n_; }
  Vertex root() const noexcept { return root_; }
  Cost operator()(Vertex u, Vertex v) const noexcept { return table_[static_cast<std::size_t>(u) * n_ + v]; }
  std::span<const Cost> row(Vertex u) const noexcept { return {table_.data() + static_cast<std::size_t>(u) * n_, n_}; }
  const std::vector<Cost>& table() const noexcept { return table_; }

  // Same distances, different root.
  MetricSpace with_root(Vertex root) const;

 private:
  std::size_t n_ = 0;
  Vertex root_ = 0;
  std::vector<Cost> table_;
};

// Exact unit-cost shortest-path metric. Throws InvalidArgument naming an
// unreachable pair when g is disconnected.
MetricSpace shortest_path_metric(const Graph& g, Vertex root);

// Positive per-edge costs (parallel to g.edges()), Dijkstra from every vertex.
MetricSpace shortest_path_metric(const Graph& g, std::span<const Cost> edge_costs, Vertex root);

Cost diameter(const MetricSpace& m);

// Shortest-path closure of i.i.d. integer weights in [1, max_weight] on the
// complete graph; always a metric with integer distances.
MetricSpace random_metric(std::size_t n, Vertex root, std::uint32_t max_weight, Rng& rng);

enum class MetricViolationKind { kNonzeroDiagonal, kAsymmetric, kZeroOffDiagonal, kTriangle };

struct MetricViolation {
  MetricViolationKind kind;
  // Offending triple; for non-triangle kinds only u and v are meaningful.
  std::array<Vertex, 3> vertices;
  std::string describe() const;
};

// First violated axiom, scanning triples (u, v, w) as dist(u,w) <= dist(u,v) + dist(v,w).
std::optional<MetricViolation> validate_metric(const MetricSpace& m, double tol = kMetricTolerance);

// Text format: "n root" then n rows of n numbers.
MetricSpace read_metric(std::istream& in);
void write_metric(std::ostream& out, const MetricSpace& m);
MetricSpace load_metric(const std::string& path);
void save_metric(const std::string& path, const MetricSpace& m);

}  // namespace unilb
