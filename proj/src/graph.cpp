#include "unilb/graph.hpp"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "unilb/error.hpp"

namespace unilb {

Graph::Graph(std::size_t n, std::vector<Edge> edges) : n_(n), edges_(std::move(edges)) {
  if (n_ >= kNoVertex) throw InvalidArgument("graph: vertex count too large");
  std::vector<std::size_t> deg(n_, 0);
  for (const Edge& e : edges_) {
    if (e.u >= n_ || e.v >= n_) {
      throw InvalidArgument(fmt::format("graph: edge ({}, {}) has endpoint outside [0, {})", e.u, e.v, n_));
    }
    ++deg[e.u];
    ++deg[e.v];
    if (e.u == e.v) ++self_loops_;
  }
  offsets_.assign(n_ + 1, 0);
  for (std::size_t v = 0; v < n_; ++v) offsets_[v + 1] = offsets_[v] + deg[v];
  targets_.resize(offsets_[n_]);
  std::vector<std::size_t> fill(offsets_.begin(), offsets_.end() - 1);
  for (const Edge& e : edges_) {
    targets_[fill[e.u]++] = e.v;
    targets_[fill[e.v]++] = e.u;
  }
  for (std::size_t v = 0; v < n_; ++v) {
    auto first = targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[v]);
    auto last = targets_.begin() + static_cast<std::ptrdiff_t>(offsets_[v + 1]);
    std::sort(first, last);
  }

  std::vector<EdgeKey> keys;
  keys.reserve(edges_.size());
  for (const Edge& e : edges_) {
    if (e.u != e.v) keys.push_back(edge_key(e.u, e.v));
  }
  std::sort(keys.begin(), keys.end());
  for (std::size_t i = 1; i < keys.size(); ++i) {
    if (keys[i] == keys[i - 1]) ++parallel_edges_;
  }
}

std::optional<std::size_t> Graph::regular_degree() const noexcept {
  if (n_ == 0) return std::nullopt;
  const std::size_t d = degree(0);
  for (Vertex v = 1; v < n_; ++v) {
    if (degree(v) != d) return std::nullopt;
  }
  return d;
}

bool Graph::is_connected() const {
  if (n_ == 0) return true;
  const auto dist = bfs_distances(*this, 0);
  return std::none_of(dist.begin(), dist.end(), [](std::uint32_t d) { return d == kUnreachable; });
}

bool Graph::has_edge(Vertex a, Vertex b) const noexcept {
  const auto nb = neighbors(a);
  return std::binary_search(nb.begin(), nb.end(), b);
}

std::vector<std::uint32_t> bfs_distances(const Graph& g, Vertex source) {
  std::vector<std::uint32_t> dist(g.num_vertices(), kUnreachable);
  std::vector<Vertex> queue;
  queue.reserve(g.num_vertices());
  dist[source] = 0;
  queue.push_back(source);
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Vertex u = queue[head];
    for (Vertex w : g.neighbors(u)) {
      if (dist[w] == kUnreachable) {
        dist[w] = dist[u] + 1;
        queue.push_back(w);
      }
    }
  }
  return dist;
}

std::optional<std::vector<std::uint8_t>> bipartition(const Graph& g) {
  constexpr std::uint8_t kUnset = 2;
  std::vector<std::uint8_t> side(g.num_vertices(), kUnset);
  std::vector<Vertex> queue;
  for (Vertex s = 0; s < g.num_vertices(); ++s) {
    if (side[s] != kUnset) continue;
    side[s] = 0;
    queue.assign(1, s);
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const Vertex u = queue[head];
      for (Vertex w : g.neighbors(u)) {
        if (side[w] == kUnset) {
          side[w] = static_cast<std::uint8_t>(1 - side[u]);
          queue.push_back(w);
        } else if (side[w] == side[u]) {
          return std::nullopt;
        }
      }
    }
  }
  return side;
}

namespace {

// BFS from `source`. Only one copy of the tree edge to the parent is skipped,
// so a parallel edge back to the parent closes a 2-cycle.
std::optional<std::size_t> shortest_cycle_from(const Graph& g, Vertex source, std::vector<std::uint32_t>& dist,
                                               std::vector<Vertex>& parent, std::vector<Vertex>& queue,
                                               std::size_t best) {
  std::fill(dist.begin(), dist.end(), kUnreachable);
  std::fill(parent.begin(), parent.end(), kNoVertex);
  queue.clear();
  dist[source] = 0;
  queue.push_back(source);
  std::optional<std::size_t> found;
  for (std::size_t head = 0; head < queue.size(); ++head) {
    const Vertex u = queue[head];
    // Any cycle closed from here or later has length >= 2*dist[u].
    if (2 * static_cast<std::size_t>(dist[u]) >= best) break;
    bool skipped_parent_edge = false;
    for (Vertex w : g.neighbors(u)) {
      if (w == u) return std::size_t{1};
      if (w == parent[u] && !skipped_parent_edge) {
        skipped_parent_edge = true;
        continue;
      }
      if (dist[w] == kUnreachable) {
        dist[w] = dist[u] + 1;
        parent[w] = u;
        queue.push_back(w);
      } else {
        const std::size_t len = static_cast<std::size_t>(dist[u]) + dist[w] + 1;
        if (len < best) {
          best = len;
          found = len;
        }
      }
    }
  }
  return found;
}

}  // namespace

std::optional<std::size_t> girth(const Graph& g) {
  const std::size_t n = g.num_vertices();
  std::vector<std::uint32_t> dist(n);
  std::vector<Vertex> parent(n);
  std::vector<Vertex> queue;
  queue.reserve(n);
  std::size_t best = std::numeric_limits<std::size_t>::max();
  std::optional<std::size_t> result;
  for (Vertex s = 0; s < n; ++s) {
    if (auto c = shortest_cycle_from(g, s, dist, parent, queue, best)) {
      best = *c;
      result = c;
      if (best == 1) break;
    }
  }
  return result;
}

std::optional<std::size_t> girth_from(const Graph& g, Vertex source) {
  const std::size_t n = g.num_vertices();
  std::vector<std::uint32_t> dist(n);
  std::vector<Vertex> parent(n);
  std::vector<Vertex> queue;
  queue.reserve(n);
  return shortest_cycle_from(g, source, dist, parent, queue, std::numeric_limits<std::size_t>::max());
}

std::uint32_t eccentricity(const Graph& g, Vertex source) {
  const auto dist = bfs_distances(g, source);
  std::uint32_t ecc = 0;
  for (Vertex v = 0; v < dist.size(); ++v) {
    if (dist[v] == kUnreachable) {
      throw InvalidArgument(fmt::format("graph is disconnected: {} cannot reach {}", source, v));
    }
    ecc = std::max(ecc, dist[v]);
  }
  return ecc;
}

std::uint32_t graph_diameter(const Graph& g) {
  std::uint32_t diam = 0;
  for (Vertex s = 0; s < g.num_vertices(); ++s) diam = std::max(diam, eccentricity(g, s));
  return diam;
}

Graph read_graph(std::istream& in) {
  std::size_t n = 0;
  std::size_t m = 0;
  if (!(in >> n >> m)) throw InvalidArgument("graph file: expected header 'n m'");
  std::vector<Edge> edges;
  edges.reserve(m);
  for (std::size_t i = 0; i < m; ++i) {
    long long u = 0;
    long long v = 0;
    if (!(in >> u >> v)) throw InvalidArgument(fmt::format("graph file: edge line {} missing", i + 1));
    if (u < 0 || v < 0 || static_cast<std::size_t>(u) >= n || static_cast<std::size_t>(v) >= n) {
      throw InvalidArgument(fmt::format("graph file: edge ({}, {}) outside [0, {})", u, v, n));
    }
    edges.push_back({static_cast<Vertex>(u), static_cast<Vertex>(v)});
  }
  return Graph(n, std::move(edges));
}

void write_graph(std::ostream& out, const Graph& g) {
  out << g.num_vertices() << ' ' << g.num_edges() << '\n';
  for (const Edge& e : g.edges()) out << e.u << ' ' << e.v << '\n';
}

Graph load_graph(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument(fmt::format("cannot open graph file '{}'", path));
  return read_graph(in);
}

void save_graph(const std::string& path, const Graph& g) {
  std::ofstream out(path);
  if (!out) throw InvalidArgument(fmt::format("cannot write graph file '{}'", path));
  write_graph(out, g);
}

}  // namespace unilb
