#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <vector>

namespace unilb {

using Vertex = std::uint32_t;
using Cost = double;

inline constexpr Vertex kNoVertex = std::numeric_limits<Vertex>::max();

struct Edge {
  Vertex u = 0;
  Vertex v = 0;
  friend bool operator==(const Edge&, const Edge&) = default;
};

// Undirected edge identity: (min, max) packed into 64 bits.
using EdgeKey = std::uint64_t;

constexpr EdgeKey edge_key(Vertex a, Vertex b) noexcept {
  const Vertex lo = a < b ? a : b;
  const Vertex hi = a < b ? b : a;
  return (static_cast<EdgeKey>(lo) << 32) | hi;
}
constexpr Vertex edge_key_low(EdgeKey k) noexcept { return static_cast<Vertex>(k >> 32); }
constexpr Vertex edge_key_high(EdgeKey k) noexcept { return static_cast<Vertex>(k & 0xffffffffu); }

/// Undirected multigraph with compressed adjacency.
///
/// Self-loops and parallel edges are representable; they are counted and
/// reported by is_simple() rather than rejected. A self-loop contributes 2
/// to its vertex's degree. Neighbor lists are sorted ascending and list a
/// neighbor once per connecting edge.
class Graph {
 public:
  Graph() = default;
  Graph(std::size_t n, std::vector<Edge> edges);

  std::size_t num_vertices() const noexcept { return n_; }
  std::size_t num_edges() const noexcept { return edges_.size(); }
  const std::vector<Edge>& edges() const noexcept { return edges_; }

  std::span<const Vertex> neighbors(Vertex v) const noexcept {
    return {targets_.data() + offsets_[v], targets_.data() + offsets_[v + 1]};
  }
  std::size_t degree(Vertex v) const noexcept { return offsets_[v + 1] - offsets_[v]; }

  std::size_t self_loop_count() const noexcept { return self_loops_; }
  std::size_t parallel_edge_count() const noexcept { return parallel_edges_; }
  bool is_simple() const noexcept { return self_loops_ == 0 && parallel_edges_ == 0; }

  // Common degree if every vertex has the same degree.
  std::optional<std::size_t> regular_degree() const noexcept;
  bool is_connected() const;
  bool has_edge(Vertex a, Vertex b) const noexcept;

 private:
  std::size_t n_ = 0;
  std::vector<Edge> edges_;
  std::vector<std::size_t> offsets_{0};
  std::vector<Vertex> targets_;
  std::size_t self_loops_ = 0;
  std::size_t parallel_edges_ = 0;
};

// Unweighted BFS distances from `source`; unreachable vertices get kUnreachable.
inline constexpr std::uint32_t kUnreachable = std::numeric_limits<std::uint32_t>::max();
std::vector<std::uint32_t> bfs_distances(const Graph& g, Vertex source);

// Two-colouring of a connected graph, if one exists (side 0 / 1 per vertex).
std::optional<std::vector<std::uint8_t>> bipartition(const Graph& g);

// Length of the shortest cycle, or nullopt for forests. Per-vertex BFS,
// O(n·m); parallel edges give 2 and self-loops give 1.
std::optional<std::size_t> girth(const Graph& g);

// Shortest cycle detected by a single BFS from `source`. Equals the girth
// whenever `source` lies on a shortest cycle, in particular for every vertex
// of a vertex-transitive graph.
std::optional<std::size_t> girth_from(const Graph& g, Vertex source);

// Largest BFS distance from `source`; throws if some vertex is unreachable.
std::uint32_t eccentricity(const Graph& g, Vertex source);

// Exact hop diameter (all-sources BFS).
std::uint32_t graph_diameter(const Graph& g);

// Text format: "n m" then m lines "u v", 0-indexed.
Graph read_graph(std::istream& in);
void write_graph(std::ostream& out, const Graph& g);
Graph load_graph(const std::string& path);
void save_graph(const std::string& path, const Graph& g);

}  // namespace unilb
