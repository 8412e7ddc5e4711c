#include "unilb/adversary.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <limits>
#include <mutex>
#include <thread>
#include <unordered_map>

#include <fmt/format.h>

#include "unilb/error.hpp"

namespace unilb {

Cost GraphDistance::operator()(Vertex u, Vertex v) {
  if (u == v) return 0.0;
  auto it = rows_.find(u);
  if (it == rows_.end()) {
    if (auto jt = rows_.find(v); jt != rows_.end()) {
      std::swap(u, v);
      it = jt;
    }
  }
  if (it == rows_.end()) {
    if (rows_.size() >= max_rows_) rows_.clear();
    it = rows_.emplace(u, bfs_distances(*g_, u)).first;
  }
  const std::uint32_t d = it->second[v];
  if (d == kUnreachable) throw PreconditionError(fmt::format("graph distance: {} cannot reach {}", u, v));
  return d;
}

// ---------------------------------------------------------------------------
// Steiner adversary

SteinerAdversaryConfig steiner_config_for(std::size_t t) {
  SteinerAdversaryConfig cfg;
  cfg.t = t;
  cfg.max_bad = static_cast<double>(t) / 8.0;
  cfg.min_distinct = static_cast<double>(t) / 2.0;
  return cfg;
}

SteinerAdversaryConfig default_steiner_config(std::size_t girth) {
  return steiner_config_for(std::max<std::size_t>(1, girth / 3));
}

SteinerSample steiner_adversary_sample(const Graph& g, Vertex root, const SteinerAdversaryConfig& cfg,
                                       std::optional<std::size_t> girth, Rng& rng) {
  if (cfg.certificate_mode) {
    if (!girth) throw PreconditionError("steiner adversary: certificate mode needs the girth");
    if (3 * cfg.t > *girth) {
      throw PreconditionError(fmt::format("steiner adversary: t = {} exceeds girth / 3 (girth {})", cfg.t, *girth));
    }
  }
  SteinerSample s;
  s.walk = random_walk(g, cfg.t, rng);
  s.terminals = make_terminal_set(s.walk.vertices, root);
  return s;
}

std::vector<EdgeKey> first_edge_set(const PathCollection& p) {
  std::vector<EdgeKey> f;
  for (Vertex v = 0; v < p.num_vertices(); ++v) {
    const auto& verts = p.path(v).vertices;
    if (verts.size() >= 2) f.push_back(edge_key(verts[0], verts[1]));
  }
  std::sort(f.begin(), f.end());
  f.erase(std::unique(f.begin(), f.end()), f.end());
  return f;
}

WalkQuality is_good_walk(const WalkTrace& w, std::span<const EdgeKey> first_edges, const SteinerAdversaryConfig& cfg) {
  WalkQuality q;
  for (std::size_t i = 0; i < w.steps(); ++i) {
    const Edge e = w.edge(i);
    if (std::binary_search(first_edges.begin(), first_edges.end(), edge_key(e.u, e.v))) ++q.bad_edges;
  }
  q.distinct = w.distinct_vertices().size();
  q.good = static_cast<double>(q.bad_edges) <= cfg.max_bad && static_cast<double>(q.distinct) >= cfg.min_distinct;
  return q;
}

CertificateResult steiner_certificate(const PathCollection& p, const WalkTrace& w, std::size_t girth,
                                      const SteinerAdversaryConfig& cfg) {
  return steiner_certificate(p, first_edge_set(p), w, girth, cfg);
}

CertificateResult steiner_certificate(const PathCollection& p, std::span<const EdgeKey> f, const WalkTrace& w,
                                      std::size_t girth, const SteinerAdversaryConfig& cfg) {
  const std::size_t t = w.steps();
  if (3 * t > girth) {
    throw PreconditionError(fmt::format("steiner certificate: walk of {} steps exceeds girth / 3 (girth {})", t, girth));
  }
  if (!is_good_walk(w, f, cfg).good) throw PreconditionError("steiner certificate: walk is not good");

  std::vector<Vertex> excluded;
  for (std::size_t i = 0; i < t; ++i) {
    const Edge e = w.edge(i);
    if (std::binary_search(f.begin(), f.end(), edge_key(e.u, e.v))) {
      excluded.push_back(e.u);
      excluded.push_back(e.v);
    }
  }
  std::sort(excluded.begin(), excluded.end());

  const TerminalSet x = make_terminal_set(w.vertices, p.root());
  CertificateResult r;
  for (Vertex u : x) {
    if (!std::binary_search(excluded.begin(), excluded.end(), u)) r.reduced_terminals.push_back(u);
  }

  const std::size_t stub_len = girth / 3;
  std::unordered_map<Vertex, Vertex> owner;
  for (Vertex u : r.reduced_terminals) {
    const RootPath& path = p.path(u);
    const std::size_t hops = std::min(stub_len, path.vertices.size() - 1);
    std::vector<Vertex> stub(path.vertices.begin(), path.vertices.begin() + static_cast<std::ptrdiff_t>(hops + 1));
    for (std::size_t i = 0; i < hops; ++i) r.stub_bound += path.hop_costs[i];
    for (Vertex v : stub) {
      auto [it, fresh] = owner.emplace(v, u);
      if (!fresh && !r.conflict) r.conflict = std::make_pair(it->second, u);
    }
    r.stubs.push_back(std::move(stub));
  }

  r.lhs = project_paths(p, x).cost;
  // With X' empty the stub argument certifies nothing; the bound degenerates to 0.
  r.rhs = r.reduced_terminals.empty() ? 0.0 : static_cast<Cost>(x.size()) * static_cast<Cost>(girth) / 6.0;
  if (r.reduced_terminals.empty()) r.note = "no surviving terminals";
  r.holds = !r.conflict && r.lhs >= r.rhs;
  if (r.conflict) r.note = fmt::format("stubs of {} and {} intersect", r.conflict->first, r.conflict->second);
  return r;
}

FrequencyEstimate good_walk_frequency(const Graph& g, std::span<const EdgeKey> first_edges,
                                      const SteinerAdversaryConfig& cfg, std::size_t trials, std::uint64_t seed) {
  std::size_t hits = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    Rng rng(derive_seed(seed, i));
    if (is_good_walk(random_walk(g, cfg.t, rng), first_edges, cfg).good) ++hits;
  }
  return make_estimate(trials, hits);
}

// ---------------------------------------------------------------------------
// TSP adversary

TspAdversaryConfig default_tsp_config(std::size_t n, std::size_t d, double gamma) {
  if (n < 2 || d < 2) throw InvalidArgument("default_tsp_config: need n >= 2 and d >= 2");
  const double logd = std::log(static_cast<double>(n)) / std::log(static_cast<double>(d));
  TspAdversaryConfig cfg;
  cfg.t = std::max<std::size_t>(1, static_cast<std::size_t>(std::floor(logd / 4.0)));
  cfg.blocks = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(gamma * logd)));
  return cfg;
}

TspSample tsp_adversary_sample(const Graph& g, Vertex root, const TspAdversaryConfig& cfg, Rng& rng) {
  TspSample s;
  Rng r1 = rng.split(0);
  Rng r2 = rng.split(1);
  s.first = random_walk(g, cfg.t, r1);
  s.second = random_walk(g, cfg.t, r2);
  s.x1 = make_terminal_set(s.first.vertices, root);
  s.x2 = make_terminal_set(s.second.vertices, root);
  std::vector<Vertex> both = s.x1;
  both.insert(both.end(), s.x2.begin(), s.x2.end());
  s.terminals = make_terminal_set(std::move(both), root);
  return s;
}

SeparationResult check_separation(const TspSample& s, const HopCost& dist, std::size_t t, double separation) {
  SeparationResult r;
  r.start_distance = dist(s.first.vertices.front(), s.second.vertices.front());
  r.e1 = r.start_distance >= separation * static_cast<double>(t);
  r.min_cross = std::numeric_limits<Cost>::infinity();
  for (Vertex u : s.x1) {
    for (Vertex v : s.x2) r.min_cross = std::min(r.min_cross, dist(u, v));
  }
  return r;
}

namespace {

struct BlockIndex {
  std::unordered_map<Vertex, std::size_t> pos;
  std::size_t blocks = 0;
  std::size_t size = 0;

  BlockIndex(const TourOrder& sigma, std::size_t requested) {
    const std::size_t n = sigma.order.size();
    pos.reserve(n);
    for (std::size_t i = 0; i < n; ++i) pos.emplace(sigma.order[i], i);
    blocks = std::min(std::max<std::size_t>(requested, 1), n);
    size = blocks == 0 ? 0 : n / blocks;
  }

  std::optional<std::size_t> block_of(Vertex v) const {
    auto it = pos.find(v);
    if (it == pos.end()) return std::nullopt;
    return std::min(it->second / size, blocks - 1);
  }
};

std::vector<bool> blocks_hit(const BlockIndex& idx, std::span<const Vertex> xs) {
  std::vector<bool> hit(idx.blocks, false);
  for (Vertex v : xs) {
    if (auto b = idx.block_of(v)) hit[*b] = true;
  }
  return hit;
}

}  // namespace

BlockStats block_alternation(const TourOrder& sigma, std::span<const Vertex> x1, std::span<const Vertex> x2,
                             std::size_t blocks, double alternation) {
  const BlockIndex idx(sigma, blocks);
  BlockStats st;
  st.blocks = idx.blocks;
  st.block_size = idx.size;
  if (idx.blocks == 0) return st;
  const auto h1 = blocks_hit(idx, x1);
  const auto h2 = blocks_hit(idx, x2);
  for (std::size_t b = 0; b < idx.blocks; ++b) {
    st.blocks1 += h1[b];
    st.blocks2 += h2[b];
    if (h1[b] && h2[b]) st.shared_blocks.push_back(b);
  }
  st.shared = st.shared_blocks.size();
  const double need = alternation * static_cast<double>(idx.blocks);
  st.e2 = static_cast<double>(st.blocks1) >= need && static_cast<double>(st.blocks2) >= need;
  return st;
}

CertificateResult tsp_certificate(const TourOrder& sigma, const HopCost& dist, const TspSample& s,
                                  const BlockStats& blocks, std::size_t t, double separation) {
  if (!check_separation(s, dist, t, separation).e1) {
    throw PreconditionError("tsp certificate: walk starts are not separated (E1 fails)");
  }
  const BlockIndex idx(sigma, blocks.blocks);
  const auto order = tour_restriction(sigma, s.terminals);
  auto in = [](const TerminalSet& xs, Vertex v) { return std::binary_search(xs.begin(), xs.end(), v); };

  CertificateResult r;
  r.holds = true;
  Cost legs = 0.0;
  for (std::size_t b : blocks.shared_blocks) {
    bool found = false;
    for (std::size_t i = 0; i + 1 < order.size() && !found; ++i) {
      const Vertex a = order[i];
      const Vertex c = order[i + 1];
      if (idx.block_of(a) != b || idx.block_of(c) != b) continue;
      if ((in(s.x1, a) && in(s.x2, c)) || (in(s.x2, a) && in(s.x1, c))) {
        r.crossings.emplace_back(a, c);
        legs += dist(a, c);
        if (dist(a, c) < static_cast<Cost>(t)) {
          r.holds = false;
          r.note = fmt::format("crossing leg ({}, {}) is shorter than t", a, c);
        }
        found = true;
      }
    }
    if (!found) {
      r.holds = false;
      r.note = fmt::format("shared block {} has no crossing leg", b);
    }
  }
  r.lhs = project_tour(sigma, dist, s.terminals);
  r.rhs = static_cast<Cost>(blocks.shared) * static_cast<Cost>(t);
  r.stub_bound = legs;
  r.holds = r.holds && r.lhs >= r.rhs;
  return r;
}

// ---------------------------------------------------------------------------
// Monte Carlo driver

std::size_t SolutionDistribution::sample(Rng& rng) const {
  if (solutions.empty() || weights.size() != solutions.size()) {
    throw InvalidArgument("solution distribution: one weight per solution required");
  }
  const double u = rng.uniform01();
  double acc = 0.0;
  for (std::size_t i = 0; i < weights.size(); ++i) {
    acc += weights[i];
    if (u < acc) return i;
  }
  // Rounding left u above the running sum; take the last positive weight.
  for (std::size_t i = weights.size(); i-- > 0;) {
    if (weights[i] > 0.0) return i;
  }
  throw InvalidArgument("solution distribution: all weights are zero");
}

void parallel_for(std::size_t count, std::size_t workers,
                  const std::function<void(std::size_t, std::size_t)>& fn) {
  workers = std::max<std::size_t>(1, std::min(workers, count));
  if (workers <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i, 0);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t i = next++; i < count; i = next++) {
        try {
          fn(i, w);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
          next = count;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

namespace {

std::size_t pow3(std::size_t k) {
  std::size_t r = 1;
  for (std::size_t i = 0; i < k; ++i) r *= 3;
  return r;
}

double ratio_of(Cost projected, Cost opt) {
  if (opt > 0.0) return projected / opt;
  return projected > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
}

}  // namespace

std::vector<LbTrial> monte_carlo_lb(const Graph& g, const SolutionDistribution& dist, const LbConfig& cfg) {
  const std::size_t n = g.num_vertices();
  // Path views of tree and path solutions, used for the first-edge sets.
  std::vector<std::optional<PathCollection>> paths(dist.solutions.size());
  std::vector<std::vector<EdgeKey>> firsts(dist.solutions.size());
  if (cfg.kind == AdversaryKind::kSteiner) {
    for (std::size_t i = 0; i < dist.solutions.size(); ++i) {
      if (const auto* t = std::get_if<SpanningTree>(&dist.solutions[i])) {
        paths[i] = tree_to_path_collection(*t);
      } else if (const auto* p = std::get_if<PathCollection>(&dist.solutions[i])) {
        paths[i] = *p;
      }
      if (paths[i]) firsts[i] = first_edge_set(*paths[i]);
    }
  }

  const std::size_t workers = std::max<std::size_t>(1, std::min(cfg.workers, cfg.trials));
  std::vector<GraphDistance> caches;
  caches.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) caches.emplace_back(g);

  std::vector<LbTrial> rows(cfg.trials);
  parallel_for(cfg.trials, workers, [&](std::size_t i, std::size_t w) {
    GraphDistance& gd = caches[w];
    const HopCost hop = gd.hop_cost();
    Rng rng(derive_seed(cfg.seed, i));
    LbTrial row;
    row.trial = i;
    row.solution = dist.sample(rng);
    const Solution& sol = dist.solutions[row.solution];

    if (cfg.kind == AdversaryKind::kSteiner) {
      const auto s = steiner_adversary_sample(g, cfg.root, cfg.steiner, cfg.girth, rng);
      row.t = s.walk.steps();
      row.x_size = s.terminals.size();
      row.projected = projected_cost(sol, hop, s.terminals);
      row.lhs = row.projected;
      if (paths[row.solution]) {
        row.good = is_good_walk(s.walk, firsts[row.solution], cfg.steiner).good;
        if (row.good && cfg.steiner.certificate_mode && cfg.girth && 3 * row.t <= *cfg.girth) {
          const auto cert = steiner_certificate(*paths[row.solution], firsts[row.solution], s.walk, *cfg.girth, cfg.steiner);
          row.certified = true;
          row.holds = cert.holds;
          row.lhs = cert.lhs;
          row.rhs = cert.rhs;
        }
      }
      const std::size_t k = s.terminals.size();
      if (k + 1 <= cfg.budget.steiner_max_terminals && pow3(k) <= cfg.exact_work_limit / std::max<std::size_t>(n, 1)) {
        row.opt = static_cast<Cost>(steiner_exact_graph(g, cfg.root, s.terminals, cfg.budget));
        row.opt_kind = OptKind::kExact;
      } else {
        row.opt = steiner_surrogate(row.t, cfg.diameter);
      }
    } else {
      const auto s = tsp_adversary_sample(g, cfg.root, cfg.tsp, rng);
      row.t = cfg.tsp.t;
      row.x_size = s.terminals.size();
      row.projected = projected_cost(sol, hop, s.terminals);
      row.lhs = row.projected;
      if (const auto* sigma = std::get_if<TourOrder>(&sol)) {
        const auto sep = check_separation(s, hop, cfg.tsp.t, cfg.tsp.separation);
        const auto bs = block_alternation(*sigma, s.x1, s.x2, cfg.tsp.blocks, cfg.tsp.alternation);
        row.e1 = sep.e1;
        row.e2 = bs.e2;
        row.shared = bs.shared;
        if (row.e1) {
          const auto cert = tsp_certificate(*sigma, hop, s, bs, cfg.tsp.t, cfg.tsp.separation);
          row.certified = true;
          row.holds = cert.holds && sep.min_cross >= static_cast<Cost>(cfg.tsp.t);
          row.lhs = cert.lhs;
          row.rhs = cert.rhs;
        }
        // Inclusion-exclusion: both walks covering 3l/4 blocks share at least l/4.
        if (row.e2 && 4 * row.shared < bs.blocks) row.holds = false;
      }
      const std::size_t k = s.terminals.size();
      if (k <= cfg.budget.tsp_max_terminals) {
        std::vector<Vertex> pts{cfg.root};
        pts.insert(pts.end(), s.terminals.begin(), s.terminals.end());
        std::vector<Cost> mat(pts.size() * pts.size());
        for (std::size_t a = 0; a < pts.size(); ++a) {
          for (std::size_t b = 0; b < pts.size(); ++b) mat[a * pts.size() + b] = hop(pts[a], pts[b]);
        }
        row.opt = tsp_exact_matrix(mat, pts.size(), cfg.budget).cost;
        row.opt_kind = OptKind::kExact;
      } else {
        row.opt = tsp_surrogate(cfg.tsp.t, cfg.tsp.t, cfg.diameter);
      }
    }
    row.ratio = ratio_of(row.projected, row.opt);
    rows[i] = row;
  });
  return rows;
}

}  // namespace unilb
