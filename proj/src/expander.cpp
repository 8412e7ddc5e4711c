#include "unilb/expander.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numeric>
#include <unordered_map>
#include <unordered_set>

#include <fmt/format.h>
#include "json.hpp"

#include "unilb/error.hpp"

namespace unilb {

std::string to_string(ExpanderKind kind) {
  return kind == ExpanderKind::kLps ? "lps" : "random-regular";
}

std::string ExpanderCertificate::to_json() const {
  nlohmann::ordered_json j;
  j["construction"] = to_string(kind);
  j["n"] = n;
  j["d"] = d;
  j["beta"] = beta;
  j["girth"] = girth ? nlohmann::ordered_json(*girth) : nlohmann::ordered_json("acyclic");
  j["diameter"] = diameter;
  j["bipartite"] = bipartite;
  j["simple"] = simple;
  if (kind == ExpanderKind::kLps) {
    j["p"] = p;
    j["q"] = q;
  } else {
    j["seed"] = seed;
  }
  if (ramanujan_bound) {
    j["ramanujan_bound"] = *ramanujan_bound;
    j["ramanujan"] = beta <= *ramanujan_bound + 1e-6;
  }
  return j.dump(2);
}

double second_eigenvalue(const Graph& g, const EigenOptions& opts) {
  const std::size_t n = g.num_vertices();
  const auto d = g.regular_degree();
  if (!d || *d == 0) throw InvalidArgument("second_eigenvalue: graph is not regular");
  if (!g.is_connected()) throw PreconditionError("second_eigenvalue: graph is disconnected");
  if (n <= 1) return 0.0;
  const auto sides = bipartition(g);
  if (n == 2 && sides) return 0.0;

  std::vector<double> sign;
  if (sides) {
    sign.resize(n);
    for (std::size_t v = 0; v < n; ++v) sign[v] = (*sides)[v] == 0 ? 1.0 : -1.0;
  }
  auto deflate = [&](std::vector<double>& x) {
    const double mean = std::accumulate(x.begin(), x.end(), 0.0) / static_cast<double>(n);
    for (double& xi : x) xi -= mean;
    if (!sign.empty()) {
      double dot = 0.0;
      for (std::size_t v = 0; v < n; ++v) dot += x[v] * sign[v];
      dot /= static_cast<double>(n);
      for (std::size_t v = 0; v < n; ++v) x[v] -= dot * sign[v];
    }
  };
  auto normalize = [](std::vector<double>& x) {
    double norm = 0.0;
    for (double xi : x) norm += xi * xi;
    norm = std::sqrt(norm);
    if (norm == 0.0) return 0.0;
    for (double& xi : x) xi /= norm;
    return norm;
  };

  Rng rng(opts.seed);
  std::vector<double> x(n);
  for (double& xi : x) xi = rng.uniform01() - 0.5;
  deflate(x);
  if (normalize(x) == 0.0) return 0.0;

  // ||A x_k|| for unit x_k = A^k x_0 / ||A^k x_0|| is nondecreasing in k and
  // converges to the largest surviving |eigenvalue|.
  std::vector<double> y(n);
  double estimate = 0.0;
  std::size_t stable = 0;
  for (std::size_t iter = 0; iter < opts.max_iterations; ++iter) {
    for (Vertex v = 0; v < n; ++v) {
      double s = 0.0;
      for (Vertex w : g.neighbors(v)) s += x[w];
      y[v] = s;
    }
    deflate(y);
    const double norm = normalize(y);
    if (norm == 0.0) return 0.0;
    const double next = norm / static_cast<double>(*d);
    const bool settled = std::abs(next - estimate) <= opts.tol * std::max(next, 1e-300);
    estimate = next;
    std::swap(x, y);
    stable = settled ? stable + 1 : 0;
    if (stable >= 8) return std::min(estimate, 1.0);
  }
  throw BudgetExceeded(fmt::format("second_eigenvalue: no convergence in {} iterations (estimate {:.9f})",
                                   opts.max_iterations, estimate));
}

bool is_prime(std::uint64_t n) {
  if (n < 2) return false;
  for (std::uint64_t f = 2; f * f <= n; ++f) {
    if (n % f == 0) return false;
  }
  return true;
}

namespace {

std::uint64_t mod_pow(std::uint64_t base, std::uint64_t exp, std::uint64_t mod) {
  std::uint64_t result = 1 % mod;
  base %= mod;
  while (exp > 0) {
    if (exp & 1) result = result * base % mod;
    base = base * base % mod;
    exp >>= 1;
  }
  return result;
}

std::uint64_t mod_inverse(std::uint64_t a, std::uint64_t q) { return mod_pow(a, q - 2, q); }

std::uint64_t reduce(std::int64_t a, std::uint64_t q) {
  const auto m = static_cast<std::int64_t>(q);
  return static_cast<std::uint64_t>(((a % m) + m) % m);
}

// 2x2 matrix over GF(q), row-major.
using Mat = std::array<std::uint64_t, 4>;

Mat multiply(const Mat& a, const Mat& b, std::uint64_t q) {
  return {(a[0] * b[0] + a[1] * b[2]) % q, (a[0] * b[1] + a[1] * b[3]) % q, (a[2] * b[0] + a[3] * b[2]) % q,
          (a[2] * b[1] + a[3] * b[3]) % q};
}

// Projective representative: scale so the first nonzero entry is 1.
Mat normalize_projective(const Mat& m, std::uint64_t q) {
  std::uint64_t lead = 0;
  for (std::uint64_t e : m) {
    if (e != 0) {
      lead = e;
      break;
    }
  }
  const std::uint64_t inv = mod_inverse(lead, q);
  return {m[0] * inv % q, m[1] * inv % q, m[2] * inv % q, m[3] * inv % q};
}

std::uint64_t encode(const Mat& m, std::uint64_t q) { return ((m[0] * q + m[1]) * q + m[2]) * q + m[3]; }

}  // namespace

int legendre(std::int64_t a, std::uint64_t q) {
  const std::uint64_t r = reduce(a, q);
  if (r == 0) return 0;
  return mod_pow(r, (q - 1) / 2, q) == 1 ? 1 : -1;
}

ExpanderInstance lps_graph(std::uint32_t p, std::uint32_t q, const EigenOptions& opts) {
  if (!is_prime(p) || !is_prime(q)) throw InvalidArgument(fmt::format("lps_graph: p={} and q={} must be prime", p, q));
  if (p == q) throw InvalidArgument("lps_graph: p and q must differ");
  if (p % 4 != 1 || q % 4 != 1) throw InvalidArgument("lps_graph: p and q must both be 1 mod 4");
  if (static_cast<double>(q) <= 2.0 * std::sqrt(static_cast<double>(p))) {
    throw InvalidArgument(fmt::format("lps_graph: q={} must exceed 2*sqrt(p)={:.3f}", q, 2.0 * std::sqrt(p)));
  }

  // i with i^2 = -1 mod q.
  std::uint64_t imag = 0;
  for (std::uint64_t x = 2; x < q; ++x) {
    if (x * x % q == q - 1) {
      imag = x;
      break;
    }
  }

  // Integer quaternions a+bi+cj+dk of norm p with a > 0 odd and b, c, d even.
  std::vector<Mat> gens;
  const auto bound = static_cast<std::int64_t>(std::sqrt(static_cast<double>(p))) + 1;
  for (std::int64_t a = 1; a <= bound; a += 2) {
    for (std::int64_t b = -bound; b <= bound; ++b) {
      for (std::int64_t c = -bound; c <= bound; ++c) {
        for (std::int64_t d = -bound; d <= bound; ++d) {
          if (a * a + b * b + c * c + d * d != static_cast<std::int64_t>(p)) continue;
          if (b % 2 != 0 || c % 2 != 0 || d % 2 != 0) continue;
          const auto ib = static_cast<std::int64_t>(imag) * b;
          const auto id = static_cast<std::int64_t>(imag) * d;
          gens.push_back(normalize_projective({reduce(a + ib, q), reduce(c + id, q), reduce(-c + id, q), reduce(a - ib, q)}, q));
        }
      }
    }
  }
  if (gens.size() != static_cast<std::size_t>(p) + 1) {
    throw Error(fmt::format("lps_graph: found {} generators, expected {}", gens.size(), p + 1));
  }

  const bool psl = legendre(p, q) == 1;
  const std::uint64_t q64 = q;
  const std::uint64_t expected = psl ? q64 * (q64 * q64 - 1) / 2 : q64 * (q64 * q64 - 1);

  std::unordered_map<std::uint64_t, Vertex> index;
  index.reserve(expected * 2);
  std::vector<Mat> elements;
  elements.reserve(expected);
  const Mat identity{1, 0, 0, 1};
  index.emplace(encode(identity, q), 0);
  elements.push_back(identity);
  std::vector<Edge> edges;
  edges.reserve(expected * gens.size() / 2);
  std::size_t self_loops = 0;
  for (std::size_t head = 0; head < elements.size(); ++head) {
    const auto u = static_cast<Vertex>(head);
    for (const Mat& s : gens) {
      const Mat next = normalize_projective(multiply(elements[head], s, q), q);
      const auto [it, inserted] = index.emplace(encode(next, q), static_cast<Vertex>(elements.size()));
      if (inserted) elements.push_back(next);
      const Vertex v = it->second;
      // The generator set is closed under inverses, so each edge is seen
      // once from each endpoint; keep the copy from the smaller one.
      if (v > u) edges.push_back({u, v});
      if (v == u) ++self_loops;
    }
  }
  if (elements.size() != expected) {
    throw Error(fmt::format("lps_graph: component has {} vertices, expected {}", elements.size(), expected));
  }
  if (self_loops > 0) {
    throw InvalidArgument(fmt::format("lps_graph: q={} too small, generators fix vertices", q));
  }

  ExpanderInstance out{Graph(elements.size(), std::move(edges)), {}};
  auto& cert = out.certificate;
  cert.kind = ExpanderKind::kLps;
  cert.p = p;
  cert.q = q;
  cert.n = out.graph.num_vertices();
  cert.d = out.graph.regular_degree().value_or(0);
  cert.simple = out.graph.is_simple();
  cert.bipartite = bipartition(out.graph).has_value();
  cert.girth = girth_from(out.graph, 0);
  cert.diameter = eccentricity(out.graph, 0);
  cert.beta = second_eigenvalue(out.graph, opts);
  cert.ramanujan_bound = 2.0 * std::sqrt(static_cast<double>(p)) / static_cast<double>(p + 1);
  return out;
}

Graph random_regular(std::size_t n, std::size_t d, std::uint64_t seed, std::size_t max_attempts) {
  if (d >= n) throw InvalidArgument(fmt::format("random_regular: degree {} must be below n={}", d, n));
  if ((n * d) % 2 != 0) throw InvalidArgument(fmt::format("random_regular: n*d = {} must be even", n * d));
  Rng rng(seed);
  // Incremental pairing: draw two free stubs, keep the pair unless it makes a
  // loop or a repeated edge; restart when no admissible pair remains.
  std::vector<Vertex> stubs;
  std::vector<EdgeKey> keys;
  std::unordered_set<EdgeKey> used;
  for (std::size_t attempt = 0; attempt < max_attempts; ++attempt) {
    stubs.resize(n * d);
    for (std::size_t i = 0; i < stubs.size(); ++i) stubs[i] = static_cast<Vertex>(i / d);
    keys.clear();
    used.clear();
    bool stuck = false;
    while (!stubs.empty() && !stuck) {
      bool placed = false;
      for (std::size_t tries = 0; tries < 64 && !placed; ++tries) {
        const auto i = static_cast<std::size_t>(rng.uniform_below(stubs.size()));
        const auto j = static_cast<std::size_t>(rng.uniform_below(stubs.size()));
        if (i == j || stubs[i] == stubs[j] || used.count(edge_key(stubs[i], stubs[j]))) continue;
        const EdgeKey k = edge_key(stubs[i], stubs[j]);
        used.insert(k);
        keys.push_back(k);
        // Remove the higher index first so the lower one stays valid.
        for (std::size_t idx : {std::max(i, j), std::min(i, j)}) {
          stubs[idx] = stubs.back();
          stubs.pop_back();
        }
        placed = true;
      }
      if (!placed) {
        // Check exhaustively before giving up on this attempt.
        stuck = true;
        for (std::size_t i = 0; i < stubs.size() && stuck; ++i) {
          for (std::size_t j = i + 1; j < stubs.size() && stuck; ++j) {
            if (stubs[i] != stubs[j] && !used.count(edge_key(stubs[i], stubs[j]))) stuck = false;
          }
        }
      }
    }
    if (stuck) continue;
    std::sort(keys.begin(), keys.end());
    std::vector<Edge> edges;
    edges.reserve(keys.size());
    for (EdgeKey k : keys) edges.push_back({edge_key_low(k), edge_key_high(k)});
    Graph g(n, std::move(edges));
    if (g.is_connected()) return g;
  }
  throw BudgetExceeded(fmt::format("random_regular: no simple graph after {} attempts", max_attempts));
}

ExpanderCertificate certify_regular_graph(const Graph& g, ExpanderKind kind, const EigenOptions& opts) {
  ExpanderCertificate cert;
  cert.kind = kind;
  cert.n = g.num_vertices();
  const auto d = g.regular_degree();
  if (!d) throw InvalidArgument("certify_regular_graph: graph is not regular");
  cert.d = *d;
  cert.simple = g.is_simple();
  cert.bipartite = bipartition(g).has_value();
  cert.girth = girth(g);
  cert.diameter = graph_diameter(g);
  cert.beta = second_eigenvalue(g, opts);
  return cert;
}

std::vector<Edge> WalkTrace::edges() const {
  std::vector<Edge> out;
  for (std::size_t i = 0; i + 1 < vertices.size(); ++i) out.push_back(edge(i));
  return out;
}

std::vector<Vertex> WalkTrace::distinct_vertices() const {
  std::vector<Vertex> out(vertices);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

WalkTrace random_walk(const Graph& g, std::size_t t, Rng& rng) {
  if (g.num_vertices() == 0) throw InvalidArgument("random_walk: empty graph");
  WalkTrace w;
  w.seed = rng.seed();
  w.vertices.reserve(t + 1);
  auto v = static_cast<Vertex>(rng.uniform_below(g.num_vertices()));
  w.vertices.push_back(v);
  for (std::size_t step = 0; step < t; ++step) {
    const auto nb = g.neighbors(v);
    if (nb.empty()) throw PreconditionError(fmt::format("random_walk: vertex {} is isolated", v));
    v = nb[rng.uniform_below(nb.size())];
    w.vertices.push_back(v);
  }
  return w;
}

bool is_valid_walk(const Graph& g, const WalkTrace& w) {
  for (Vertex v : w.vertices) {
    if (v >= g.num_vertices()) return false;
  }
  for (std::size_t i = 0; i + 1 < w.vertices.size(); ++i) {
    if (!g.has_edge(w.vertices[i], w.vertices[i + 1])) return false;
  }
  return true;
}

FrequencyEstimate make_estimate(std::size_t trials, std::size_t hits) {
  FrequencyEstimate e;
  e.trials = trials;
  e.hits = hits;
  if (trials > 0) {
    e.frequency = static_cast<double>(hits) / static_cast<double>(trials);
    e.sigma = std::sqrt(e.frequency * (1.0 - e.frequency) / static_cast<double>(trials));
  }
  return e;
}

namespace {

double set_density(const Graph& g, const std::vector<bool>& in_set) {
  if (in_set.size() != g.num_vertices()) throw InvalidArgument("walk stats: membership vector has wrong length");
  const auto size = static_cast<double>(std::count(in_set.begin(), in_set.end(), true));
  return size / static_cast<double>(g.num_vertices());
}

}  // namespace

ConfinementStats walk_confinement_stats(const Graph& g, const std::vector<bool>& in_set, std::size_t t, double beta,
                                        std::size_t trials, std::uint64_t seed) {
  ConfinementStats out;
  out.alpha = set_density(g, in_set);
  out.bound = std::pow(out.alpha + beta, static_cast<double>(t));
  std::size_t hits = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    Rng rng(derive_seed(seed, i));
    const WalkTrace w = random_walk(g, t, rng);
    if (std::all_of(w.vertices.begin(), w.vertices.end(), [&](Vertex v) { return in_set[v]; })) ++hits;
  }
  out.estimate = make_estimate(trials, hits);
  return out;
}

VisitStats walk_visit_stats(const Graph& g, const std::vector<bool>& in_set, std::size_t t, double gamma, double beta,
                            std::size_t trials, std::uint64_t seed) {
  if (gamma < 0.0 || gamma > 1.0) throw InvalidArgument("walk_visit_stats: gamma must lie in [0, 1]");
  VisitStats out;
  out.alpha = set_density(g, in_set);
  const double threshold = gamma * static_cast<double>(t);
  out.bound = std::pow(2.0, static_cast<double>(t)) * std::pow(out.alpha + beta, threshold);
  std::size_t position_hits = 0;
  std::size_t distinct_hits = 0;
  for (std::size_t i = 0; i < trials; ++i) {
    Rng rng(derive_seed(seed, i));
    const WalkTrace w = random_walk(g, t, rng);
    const auto positions = std::count_if(w.vertices.begin(), w.vertices.end(), [&](Vertex v) { return in_set[v]; });
    const auto distinct = w.distinct_vertices();
    const auto distinct_in = std::count_if(distinct.begin(), distinct.end(), [&](Vertex v) { return in_set[v]; });
    if (static_cast<double>(positions) > threshold) ++position_hits;
    if (static_cast<double>(distinct_in) > threshold) ++distinct_hits;
  }
  out.positions = make_estimate(trials, position_hits);
  out.distinct = make_estimate(trials, distinct_hits);
  return out;
}

}  // namespace unilb
