#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include "unilb/graph.hpp"
#include "unilb/metric.hpp"
#include "unilb/rng.hpp"

namespace unilb {

// Cost of a direct hop between two vertices.
using HopCost = std::function<Cost(Vertex, Vertex)>;

HopCost metric_hop_cost(const MetricSpace& m);
HopCost unit_hop_cost();

/// Rooted tree stored as a parent map.
///
/// parent[root] == root. Vertices outside the tree have parent kNoVertex,
/// which lets the same type carry the projected subtree T[X] and the partial
/// trees a mechanism may emit; a spanning tree has no such vertices.
class SpanningTree {
 public:
  SpanningTree() = default;
  // Throws InvalidArgument if the parent map has a cycle or a present vertex
  // does not reach the root.
  SpanningTree(Vertex root, std::vector<Vertex> parent, const HopCost& hop);

  Vertex root() const noexcept { return root_; }
  std::size_t num_vertices() const noexcept { return parent_.size(); }
  bool contains(Vertex v) const noexcept { return v < parent_.size() && parent_[v] != kNoVertex; }
  bool is_spanning() const noexcept;
  Vertex parent(Vertex v) const noexcept { return parent_[v]; }
  Cost parent_cost(Vertex v) const noexcept { return parent_cost_[v]; }
  const std::vector<Vertex>& parents() const noexcept { return parent_; }
  Cost total_cost() const noexcept;
  // Children of each vertex, ascending.
  std::vector<std::vector<Vertex>> children() const;
  // Path v -> root along parent pointers, inclusive of both ends.
  std::vector<Vertex> path_to_root(Vertex v) const;
  // Cost of the unique tree path between u and v.
  Cost tree_distance(Vertex u, Vertex v) const;

 private:
  Vertex root_ = 0;
  std::vector<Vertex> parent_;
  std::vector<Cost> parent_cost_;
};

/// One root path per vertex; paths[root] is the single vertex {root}.
struct RootPath {
  std::vector<Vertex> vertices;  // v, ..., root
  std::vector<Cost> hop_costs;   // one per consecutive pair
  Cost cost() const noexcept;
};

class PathCollection {
 public:
  PathCollection() = default;
  // An empty path for a non-root vertex marks it as uncovered.
  PathCollection(Vertex root, std::vector<RootPath> paths);

  Vertex root() const noexcept { return root_; }
  std::size_t num_vertices() const noexcept { return paths_.size(); }
  const RootPath& path(Vertex v) const noexcept { return paths_[v]; }
  bool covers(Vertex v) const noexcept { return v == root_ || !paths_[v].vertices.empty(); }

 private:
  Vertex root_ = 0;
  std::vector<RootPath> paths_;
};

// Build a collection from vertex sequences, costing hops with `hop`.
PathCollection make_path_collection(Vertex root, std::vector<std::vector<Vertex>> paths, const HopCost& hop);

/// Visiting order of the non-root vertices; the tour starts and ends at root.
struct TourOrder {
  Vertex root = 0;
  std::vector<Vertex> order;

  // Position of each vertex in `order`, kNoVertex for the root and absentees.
  std::vector<Vertex> positions(std::size_t n) const;
};

// Sorted, duplicate-free terminal set.
using TerminalSet = std::vector<Vertex>;
TerminalSet make_terminal_set(std::vector<Vertex> vertices, Vertex root);

struct ProjectionResult {
  Cost cost = 0.0;
  std::vector<EdgeKey> edges;  // ascending
};

// BFS tree of g from `root` (neighbors scanned in ascending order), hop costs from `hop`.
SpanningTree shortest_path_tree(const Graph& g, Vertex root, const HopCost& hop);
SpanningTree shortest_path_tree(const MetricSpace& m, const Graph& g);

// Union of tree paths from each terminal to the root.
ProjectionResult project_tree(const SpanningTree& t, std::span<const Vertex> terminals);

// Minimal rooted subtree containing the terminals, as a partial tree.
SpanningTree induced_subtree(const SpanningTree& t, std::span<const Vertex> terminals);

// c(r, x_1) + sum c(x_i, x_{i+1}) + c(x_k, r) over terminals in tour order.
Cost project_tour(const TourOrder& sigma, const MetricSpace& m, std::span<const Vertex> terminals);
Cost project_tour(const TourOrder& sigma, const HopCost& hop, std::span<const Vertex> terminals);
// Terminals sorted into tour order (root dropped).
std::vector<Vertex> tour_restriction(const TourOrder& sigma, std::span<const Vertex> terminals);

// Cost of the union of edge sets of the terminals' paths.
ProjectionResult project_paths(const PathCollection& p, std::span<const Vertex> terminals);

// Depth-first preorder from the root, children ascending.
TourOrder tree_to_tour(const SpanningTree& t);

PathCollection tree_to_path_collection(const SpanningTree& t);

/// Hierarchically well-separated tree from one FRT draw.
///
/// Node 0 is the top cluster (all of V). A node at level i hangs from its
/// parent by an edge of weight 4 * 2^i * unit, where unit is the smallest
/// positive distance. Leaves sit at level 0 and are singletons.
struct HstNode {
  int level = 0;
  std::size_t parent = 0;  // node index; the top node is its own parent
  std::vector<std::size_t> children;
  std::vector<Vertex> members;  // ascending
  Vertex carving_center = 0;    // permutation point whose ball carved the cluster
  Vertex center = 0;            // member with the smallest permutation rank
  Cost parent_weight = 0.0;
};

class Hst {
 public:
  Hst() = default;
  Hst(std::vector<HstNode> nodes, std::vector<std::size_t> leaf_of, Cost unit, double beta, std::vector<Vertex> permutation);

  const std::vector<HstNode>& nodes() const noexcept { return nodes_; }
  std::size_t leaf(Vertex v) const noexcept { return leaf_of_[v]; }
  std::size_t num_points() const noexcept { return leaf_of_.size(); }
  Cost unit() const noexcept { return unit_; }
  double scale_factor() const noexcept { return beta_; }
  const std::vector<Vertex>& permutation() const noexcept { return permutation_; }

  Cost distance(Vertex u, Vertex v) const;
  Cost total_weight() const;
  // Weight of the minimal subtree joining the leaves of the terminals and the root.
  Cost project(std::span<const Vertex> terminals, Vertex root) const;

 private:
  std::vector<HstNode> nodes_;
  std::vector<std::size_t> leaf_of_;
  Cost unit_ = 1.0;
  double beta_ = 1.0;
  std::vector<Vertex> permutation_;
};

// One draw from the FRT distribution: a shared random permutation and a
// radius factor beta in [1, 2); level-i clusters are carved with radius
// beta * 2^(i-1) * unit starting below the smallest power of two covering
// the diameter.
Hst frt_sample(const MetricSpace& m, Rng& rng);

// Contract each HST node onto its center, join child centers to parent
// centers, and re-root the resulting spanning tree at m.root().
SpanningTree hst_to_spanning_tree(const Hst& h, const MetricSpace& m);

// Any of the three universal solution shapes.
using Solution = std::variant<SpanningTree, PathCollection, TourOrder>;

// "tree", "paths" or "tour".
std::string solution_kind(const Solution& s);

// c(T[X]), c(P[X]) or c(sigma_X); `hop` prices tour legs only.
Cost projected_cost(const Solution& s, const HopCost& hop, std::span<const Vertex> terminals);

// I/O: tree as n lines "v parent", tour as one line, paths as n lines.
void write_tree(std::ostream& out, const SpanningTree& t);
SpanningTree read_tree(std::istream& in, const HopCost& hop);
void write_tour(std::ostream& out, const TourOrder& sigma);
TourOrder read_tour(std::istream& in, Vertex root);
void write_paths(std::ostream& out, const PathCollection& p);
PathCollection read_paths(std::istream& in, Vertex root, const HopCost& hop);

}  // namespace unilb
