#include "unilb/universal.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>
#include <string>
#include <unordered_map>

#include <fmt/format.h>

#include "unilb/error.hpp"

namespace unilb {

HopCost metric_hop_cost(const MetricSpace& m) {
  return [&m](Vertex u, Vertex v) { return m(u, v); };
}

HopCost unit_hop_cost() {
  return [](Vertex u, Vertex v) { return u == v ? 0.0 : 1.0; };
}

// ---------------------------------------------------------------------------
// SpanningTree

SpanningTree::SpanningTree(Vertex root, std::vector<Vertex> parent, const HopCost& hop)
    : root_(root), parent_(std::move(parent)), parent_cost_(parent_.size(), 0.0) {
  const std::size_t n = parent_.size();
  if (root_ >= n || parent_[root_] != root_) throw InvalidArgument("tree: root must be its own parent");
  // 0 = unvisited, 1 = on current climb, 2 = known to reach the root.
  std::vector<std::uint8_t> state(n, 0);
  state[root_] = 2;
  std::vector<Vertex> climb;
  for (Vertex v = 0; v < n; ++v) {
    if (parent_[v] == kNoVertex || state[v] == 2) continue;
    climb.clear();
    Vertex u = v;
    while (state[u] == 0) {
      state[u] = 1;
      climb.push_back(u);
      const Vertex p = parent_[u];
      if (p == kNoVertex || p >= n) throw InvalidArgument(fmt::format("tree: vertex {} does not reach the root", u));
      u = p;
    }
    if (state[u] == 1) throw InvalidArgument(fmt::format("tree: parent map has a cycle through {}", u));
    for (Vertex w : climb) state[w] = 2;
  }
  for (Vertex v = 0; v < n; ++v) {
    if (v != root_ && parent_[v] != kNoVertex) parent_cost_[v] = hop(v, parent_[v]);
  }
}

bool SpanningTree::is_spanning() const noexcept {
  return std::none_of(parent_.begin(), parent_.end(), [](Vertex p) { return p == kNoVertex; });
}

Cost SpanningTree::total_cost() const noexcept {
  Cost sum = 0.0;
  for (Cost c : parent_cost_) sum += c;
  return sum;
}

std::vector<std::vector<Vertex>> SpanningTree::children() const {
  std::vector<std::vector<Vertex>> out(parent_.size());
  for (Vertex v = 0; v < parent_.size(); ++v) {
    if (v != root_ && parent_[v] != kNoVertex) out[parent_[v]].push_back(v);
  }
  return out;
}

std::vector<Vertex> SpanningTree::path_to_root(Vertex v) const {
  if (!contains(v)) throw InvalidArgument(fmt::format("tree: vertex {} is not in the tree", v));
  std::vector<Vertex> path{v};
  while (v != root_) {
    v = parent_[v];
    path.push_back(v);
  }
  return path;
}

Cost SpanningTree::tree_distance(Vertex u, Vertex v) const {
  std::unordered_map<Vertex, Cost> up;
  Cost acc = 0.0;
  for (Vertex w : path_to_root(u)) {
    up.emplace(w, acc);
    acc += parent_cost_[w];
  }
  acc = 0.0;
  Vertex w = v;
  while (true) {
    if (auto it = up.find(w); it != up.end()) return acc + it->second;
    acc += parent_cost_[w];
    w = parent_[w];
  }
}

// ---------------------------------------------------------------------------
// Paths and tours

Cost RootPath::cost() const noexcept {
  Cost sum = 0.0;
  for (Cost c : hop_costs) sum += c;
  return sum;
}

PathCollection::PathCollection(Vertex root, std::vector<RootPath> paths) : root_(root), paths_(std::move(paths)) {
  if (root_ >= paths_.size()) throw InvalidArgument("path collection: root out of range");
  for (Vertex v = 0; v < paths_.size(); ++v) {
    const auto& p = paths_[v];
    if (p.vertices.empty()) {
      if (v == root_) throw InvalidArgument("path collection: root path must be {root}");
      continue;
    }
    if (p.vertices.front() != v || p.vertices.back() != root_) {
      throw InvalidArgument(fmt::format("path collection: path of {} must run from {} to the root", v, v));
    }
    if (p.hop_costs.size() + 1 != p.vertices.size()) {
      throw InvalidArgument(fmt::format("path collection: path of {} has mismatched hop costs", v));
    }
  }
  if (paths_[root_].vertices.size() != 1) throw InvalidArgument("path collection: root path must be {root}");
}

PathCollection make_path_collection(Vertex root, std::vector<std::vector<Vertex>> paths, const HopCost& hop) {
  std::vector<RootPath> out(paths.size());
  for (std::size_t v = 0; v < paths.size(); ++v) {
    out[v].vertices = std::move(paths[v]);
    for (std::size_t i = 0; i + 1 < out[v].vertices.size(); ++i) {
      out[v].hop_costs.push_back(hop(out[v].vertices[i], out[v].vertices[i + 1]));
    }
  }
  return PathCollection(root, std::move(out));
}

std::vector<Vertex> TourOrder::positions(std::size_t n) const {
  std::vector<Vertex> pos(n, kNoVertex);
  for (std::size_t i = 0; i < order.size(); ++i) pos[order[i]] = static_cast<Vertex>(i);
  return pos;
}

TerminalSet make_terminal_set(std::vector<Vertex> vertices, Vertex root) {
  std::sort(vertices.begin(), vertices.end());
  vertices.erase(std::unique(vertices.begin(), vertices.end()), vertices.end());
  vertices.erase(std::remove(vertices.begin(), vertices.end(), root), vertices.end());
  return vertices;
}

// ---------------------------------------------------------------------------
// Shortest path tree and projections

SpanningTree shortest_path_tree(const Graph& g, Vertex root, const HopCost& hop) {
  const std::size_t n = g.num_vertices();
  std::vector<Vertex> parent(n, kNoVertex);
  std::vector<Vertex> queue{root};
  queue.reserve(n);
  parent[root] = root;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Vertex u = queue[head];
    for (Vertex w : g.neighbors(u)) {
      if (parent[w] == kNoVertex) {
        parent[w] = u;
        queue.push_back(w);
      }
    }
  }
  if (queue.size() != n) throw PreconditionError("shortest_path_tree: graph is disconnected");
  return SpanningTree(root, std::move(parent), hop);
}

SpanningTree shortest_path_tree(const MetricSpace& m, const Graph& g) {
  if (m.size() != g.num_vertices()) throw InvalidArgument("shortest_path_tree: metric and graph sizes differ");
  return shortest_path_tree(g, m.root(), metric_hop_cost(m));
}

namespace {

std::vector<bool> mark_union_to_root(const SpanningTree& t, std::span<const Vertex> terminals) {
  std::vector<bool> marked(t.num_vertices(), false);
  marked[t.root()] = true;
  for (Vertex x : terminals) {
    if (!t.contains(x)) throw InvalidArgument(fmt::format("projection: terminal {} is not in the tree", x));
    Vertex v = x;
    while (!marked[v]) {
      marked[v] = true;
      v = t.parent(v);
    }
  }
  return marked;
}

}  // namespace

ProjectionResult project_tree(const SpanningTree& t, std::span<const Vertex> terminals) {
  const auto marked = mark_union_to_root(t, terminals);
  ProjectionResult out;
  for (Vertex v = 0; v < marked.size(); ++v) {
    if (marked[v] && v != t.root()) {
      out.cost += t.parent_cost(v);
      out.edges.push_back(edge_key(v, t.parent(v)));
    }
  }
  std::sort(out.edges.begin(), out.edges.end());
  return out;
}

SpanningTree induced_subtree(const SpanningTree& t, std::span<const Vertex> terminals) {
  const auto marked = mark_union_to_root(t, terminals);
  std::vector<Vertex> parent(t.num_vertices(), kNoVertex);
  for (Vertex v = 0; v < marked.size(); ++v) {
    if (marked[v]) parent[v] = t.parent(v);
  }
  const SpanningTree& source = t;
  return SpanningTree(t.root(), std::move(parent), [&source](Vertex v, Vertex) { return source.parent_cost(v); });
}

std::vector<Vertex> tour_restriction(const TourOrder& sigma, std::span<const Vertex> terminals) {
  std::unordered_map<Vertex, std::size_t> pos;
  pos.reserve(sigma.order.size());
  for (std::size_t i = 0; i < sigma.order.size(); ++i) pos.emplace(sigma.order[i], i);
  std::vector<std::pair<std::size_t, Vertex>> keyed;
  for (Vertex x : terminals) {
    if (x == sigma.root) continue;
    auto it = pos.find(x);
    if (it == pos.end()) throw InvalidArgument(fmt::format("tour projection: terminal {} is not on the tour", x));
    keyed.emplace_back(it->second, x);
  }
  std::sort(keyed.begin(), keyed.end());
  std::vector<Vertex> out;
  out.reserve(keyed.size());
  for (const auto& [p, x] : keyed) out.push_back(x);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

Cost project_tour(const TourOrder& sigma, const HopCost& hop, std::span<const Vertex> terminals) {
  const auto visit = tour_restriction(sigma, terminals);
  if (visit.empty()) return 0.0;
  Cost sum = hop(sigma.root, visit.front());
  for (std::size_t i = 0; i + 1 < visit.size(); ++i) sum += hop(visit[i], visit[i + 1]);
  return sum + hop(visit.back(), sigma.root);
}

Cost project_tour(const TourOrder& sigma, const MetricSpace& m, std::span<const Vertex> terminals) {
  return project_tour(sigma, metric_hop_cost(m), terminals);
}

ProjectionResult project_paths(const PathCollection& p, std::span<const Vertex> terminals) {
  std::unordered_map<EdgeKey, Cost> used;
  for (Vertex x : terminals) {
    if (x >= p.num_vertices() || !p.covers(x)) {
      throw InvalidArgument(fmt::format("path projection: vertex {} has no path", x));
    }
    const RootPath& path = p.path(x);
    for (std::size_t i = 0; i + 1 < path.vertices.size(); ++i) {
      used.emplace(edge_key(path.vertices[i], path.vertices[i + 1]), path.hop_costs[i]);
    }
  }
  ProjectionResult out;
  out.edges.reserve(used.size());
  for (const auto& [k, c] : used) out.edges.push_back(k);
  std::sort(out.edges.begin(), out.edges.end());
  // Summed in key order so the total does not depend on hash iteration order.
  for (EdgeKey k : out.edges) out.cost += used.at(k);
  return out;
}

TourOrder tree_to_tour(const SpanningTree& t) {
  const auto kids = t.children();
  TourOrder sigma;
  sigma.root = t.root();
  std::vector<Vertex> stack{t.root()};
  while (!stack.empty()) {
    const Vertex v = stack.back();
    stack.pop_back();
    if (v != t.root()) sigma.order.push_back(v);
    const auto& c = kids[v];
    for (auto it = c.rbegin(); it != c.rend(); ++it) stack.push_back(*it);
  }
  return sigma;
}

PathCollection tree_to_path_collection(const SpanningTree& t) {
  std::vector<RootPath> paths(t.num_vertices());
  for (Vertex v = 0; v < t.num_vertices(); ++v) {
    if (!t.contains(v)) continue;
    paths[v].vertices = t.path_to_root(v);
    for (std::size_t i = 0; i + 1 < paths[v].vertices.size(); ++i) {
      paths[v].hop_costs.push_back(t.parent_cost(paths[v].vertices[i]));
    }
  }
  return PathCollection(t.root(), std::move(paths));
}

// ---------------------------------------------------------------------------
// HST

Hst::Hst(std::vector<HstNode> nodes, std::vector<std::size_t> leaf_of, Cost unit, double beta,
         std::vector<Vertex> permutation)
    : nodes_(std::move(nodes)), leaf_of_(std::move(leaf_of)), unit_(unit), beta_(beta),
      permutation_(std::move(permutation)) {}

Cost Hst::distance(Vertex u, Vertex v) const {
  std::size_t a = leaf_of_[u];
  std::size_t b = leaf_of_[v];
  Cost sum = 0.0;
  // Leaves share level 0, so both climbs stay in lockstep.
  while (a != b) {
    sum += nodes_[a].parent_weight + nodes_[b].parent_weight;
    a = nodes_[a].parent;
    b = nodes_[b].parent;
  }
  return sum;
}

Cost Hst::total_weight() const {
  Cost sum = 0.0;
  for (std::size_t i = 1; i < nodes_.size(); ++i) sum += nodes_[i].parent_weight;
  return sum;
}

Cost Hst::project(std::span<const Vertex> terminals, Vertex root) const {
  std::vector<Vertex> points(terminals.begin(), terminals.end());
  points.push_back(root);
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  std::vector<std::size_t> below(nodes_.size(), 0);
  for (Vertex x : points) {
    std::size_t a = leaf_of_[x];
    while (true) {
      ++below[a];
      if (a == 0) break;
      a = nodes_[a].parent;
    }
  }
  Cost sum = 0.0;
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (below[i] > 0 && below[i] < points.size()) sum += nodes_[i].parent_weight;
  }
  return sum;
}

Hst frt_sample(const MetricSpace& m, Rng& rng) {
  const std::size_t n = m.size();
  if (n == 0) throw InvalidArgument("frt_sample: empty metric");
  std::vector<Vertex> perm(n);
  for (Vertex v = 0; v < n; ++v) perm[v] = v;
  rng.shuffle(perm);
  std::vector<std::size_t> rank(n);
  for (std::size_t i = 0; i < n; ++i) rank[perm[i]] = i;
  const double beta = 1.0 + rng.uniform01();

  Cost unit = std::numeric_limits<Cost>::infinity();
  for (Cost c : m.table()) {
    if (c > 0.0) unit = std::min(unit, c);
  }
  if (n == 1) {
    HstNode leaf;
    leaf.members = {0};
    return Hst({leaf}, {0}, 1.0, beta, perm);
  }
  const Cost diam = diameter(m);
  int top = 1;
  while (std::ldexp(unit, top) < diam) ++top;

  std::vector<HstNode> nodes(1);
  nodes[0].level = top;
  nodes[0].parent = 0;
  nodes[0].members.resize(n);
  for (Vertex v = 0; v < n; ++v) nodes[0].members[v] = v;
  nodes[0].carving_center = perm[0];
  nodes[0].center = perm[0];

  std::vector<std::size_t> frontier{0};
  std::vector<std::size_t> next;
  for (int level = top - 1; level >= 0; --level) {
    const double radius = beta * std::ldexp(unit, level - 1);
    next.clear();
    for (std::size_t c : frontier) {
      // Each member joins the ball of the first permutation point covering it.
      std::vector<std::pair<std::size_t, Vertex>> assignment;
      for (Vertex v : nodes[c].members) {
        std::size_t l = 0;
        while (m(v, perm[l]) > radius) ++l;
        assignment.emplace_back(l, v);
      }
      std::sort(assignment.begin(), assignment.end());
      for (std::size_t i = 0; i < assignment.size();) {
        HstNode child;
        child.level = level;
        child.parent = c;
        child.carving_center = perm[assignment[i].first];
        child.parent_weight = 4.0 * std::ldexp(unit, level);
        std::size_t best_rank = n;
        std::size_t j = i;
        for (; j < assignment.size() && assignment[j].first == assignment[i].first; ++j) {
          const Vertex v = assignment[j].second;
          child.members.push_back(v);
          if (rank[v] < best_rank) {
            best_rank = rank[v];
            child.center = v;
          }
        }
        std::sort(child.members.begin(), child.members.end());
        nodes.push_back(std::move(child));
        nodes[c].children.push_back(nodes.size() - 1);
        next.push_back(nodes.size() - 1);
        i = j;
      }
    }
    std::swap(frontier, next);
  }

  std::vector<std::size_t> leaf_of(n, 0);
  for (std::size_t c : frontier) {
    if (nodes[c].members.size() != 1) throw Error("frt_sample: level-0 cluster is not a singleton");
    leaf_of[nodes[c].members.front()] = c;
  }
  return Hst(std::move(nodes), std::move(leaf_of), unit, beta, std::move(perm));
}

SpanningTree hst_to_spanning_tree(const Hst& h, const MetricSpace& m) {
  const std::size_t n = h.num_points();
  if (m.size() != n) throw InvalidArgument("hst_to_spanning_tree: metric size mismatch");
  std::vector<std::vector<Vertex>> adj(n);
  std::size_t edges = 0;
  const auto& nodes = h.nodes();
  for (std::size_t i = 1; i < nodes.size(); ++i) {
    const Vertex a = nodes[i].center;
    const Vertex b = nodes[nodes[i].parent].center;
    if (a == b) continue;
    adj[a].push_back(b);
    adj[b].push_back(a);
    ++edges;
  }
  if (edges + 1 != n) throw Error("hst_to_spanning_tree: contraction did not yield a spanning tree");
  std::vector<Vertex> parent(n, kNoVertex);
  std::vector<Vertex> queue{m.root()};
  parent[m.root()] = m.root();
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Vertex u = queue[head];
    std::sort(adj[u].begin(), adj[u].end());
    for (Vertex w : adj[u]) {
      if (parent[w] == kNoVertex) {
        parent[w] = u;
        queue.push_back(w);
      }
    }
  }
  return SpanningTree(m.root(), std::move(parent), metric_hop_cost(m));
}

std::string solution_kind(const Solution& s) {
  switch (s.index()) {
    case 0:
      return "tree";
    case 1:
      return "paths";
    default:
      return "tour";
  }
}

Cost projected_cost(const Solution& s, const HopCost& hop, std::span<const Vertex> terminals) {
  if (const auto* t = std::get_if<SpanningTree>(&s)) return project_tree(*t, terminals).cost;
  if (const auto* p = std::get_if<PathCollection>(&s)) return project_paths(*p, terminals).cost;
  return project_tour(std::get<TourOrder>(s), hop, terminals);
}

// ---------------------------------------------------------------------------
// I/O

void write_tree(std::ostream& out, const SpanningTree& t) {
  for (Vertex v = 0; v < t.num_vertices(); ++v) {
    out << v << ' ';
    if (t.contains(v)) {
      out << t.parent(v);
    } else {
      out << -1;
    }
    out << '\n';
  }
}

SpanningTree read_tree(std::istream& in, const HopCost& hop) {
  std::vector<std::pair<long long, long long>> rows;
  long long v = 0;
  long long p = 0;
  while (in >> v >> p) rows.emplace_back(v, p);
  const std::size_t n = rows.size();
  std::vector<Vertex> parent(n, kNoVertex);
  std::vector<bool> seen(n, false);
  Vertex root = kNoVertex;
  for (const auto& [vv, pp] : rows) {
    if (vv < 0 || static_cast<std::size_t>(vv) >= n || seen[static_cast<std::size_t>(vv)]) {
      throw InvalidArgument(fmt::format("tree file: bad or repeated vertex {}", vv));
    }
    seen[static_cast<std::size_t>(vv)] = true;
    if (pp < 0) continue;
    if (static_cast<std::size_t>(pp) >= n) throw InvalidArgument(fmt::format("tree file: parent {} out of range", pp));
    parent[static_cast<std::size_t>(vv)] = static_cast<Vertex>(pp);
    if (vv == pp) {
      if (root != kNoVertex) throw InvalidArgument("tree file: more than one root");
      root = static_cast<Vertex>(vv);
    }
  }
  if (root == kNoVertex) throw InvalidArgument("tree file: no root (a vertex that is its own parent)");
  return SpanningTree(root, std::move(parent), hop);
}

void write_tour(std::ostream& out, const TourOrder& sigma) {
  for (std::size_t i = 0; i < sigma.order.size(); ++i) {
    if (i > 0) out << ' ';
    out << sigma.order[i];
  }
  out << '\n';
}

TourOrder read_tour(std::istream& in, Vertex root) {
  TourOrder sigma;
  sigma.root = root;
  std::string line;
  std::getline(in, line);
  std::istringstream ls(line);
  long long v = 0;
  while (ls >> v) {
    if (v < 0) throw InvalidArgument("tour file: negative vertex");
    sigma.order.push_back(static_cast<Vertex>(v));
  }
  auto sorted = sigma.order;
  std::sort(sorted.begin(), sorted.end());
  if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) {
    throw InvalidArgument("tour file: a vertex appears twice");
  }
  if (std::binary_search(sorted.begin(), sorted.end(), root)) throw InvalidArgument("tour file: root listed in order");
  return sigma;
}

void write_paths(std::ostream& out, const PathCollection& p) {
  for (Vertex v = 0; v < p.num_vertices(); ++v) {
    const auto& verts = p.path(v).vertices;
    for (std::size_t i = 0; i < verts.size(); ++i) {
      if (i > 0) out << ' ';
      out << verts[i];
    }
    out << '\n';
  }
}

PathCollection read_paths(std::istream& in, Vertex root, const HopCost& hop) {
  std::vector<std::vector<Vertex>> paths;
  std::string line;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    std::vector<Vertex> path;
    long long v = 0;
    while (ls >> v) {
      if (v < 0) throw InvalidArgument("path file: negative vertex");
      path.push_back(static_cast<Vertex>(v));
    }
    paths.push_back(std::move(path));
  }
  while (!paths.empty() && paths.back().empty() && paths.size() > static_cast<std::size_t>(root) + 1) paths.pop_back();
  return make_path_collection(root, std::move(paths), hop);
}

}  // namespace unilb
