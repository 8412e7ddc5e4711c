#include "unilb/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "unilb/error.hpp"
#include "unilb/oracles.hpp"
#include "unilb/privacy.hpp"

namespace unilb {

namespace {

const std::map<std::string, std::string>& default_values() {
  static const std::map<std::string, std::string> d = {
      {"pipeline", "steiner-lb"},
      {"graph", "lps:5:13"},
      {"root", "0"},
      {"solution", "spt"},
      {"solution_count", "1"},
      {"t", "auto"},
      {"max_bad", "auto"},
      {"min_distinct", "auto"},
      {"certificate", "true"},
      {"blocks", "auto"},
      {"gamma", "1"},
      {"separation", "3"},
      {"alternation", "0.75"},
      {"trials", "1000"},
      {"seed", "1"},
      {"workers", "1"},
      {"steiner_cap", "12"},
      {"tsp_cap", "14"},
      {"exact_work_limit", "67108864"},
      {"csv", ""},
      {"json", ""},
      {"plot", ""},
      {"metrics", "100"},
      {"min_points", "32"},
      {"max_points", "64"},
      {"max_weight", "20"},
      {"trees", "32"},
      {"sets_per_metric", "4"},
      {"max_terminals", "10"},
      {"mech", ""},
      {"witness", ""},
      {"eps", "auto"},
  };
  return d;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::string num(double x) {
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  return fmt::format("{}", x);
}

std::string flag(bool b) { return b ? "1" : "0"; }

double quantile(std::vector<double> v, double q) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const auto idx = static_cast<std::size_t>(std::floor(q * static_cast<double>(v.size() - 1)));
  return v[idx];
}

double median_of(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size();
  return m % 2 == 1 ? v[m / 2] : 0.5 * (v[m / 2 - 1] + v[m / 2]);
}

}  // namespace

// ---------------------------------------------------------------------------
// RunConfig

RunConfig::RunConfig() : values_(default_values()) {}

void RunConfig::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw InvalidArgument(fmt::format("config: unknown key '{}'", key));
  it->second = value;
}

void RunConfig::apply(const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos) throw InvalidArgument(fmt::format("config: expected key=value, got '{}'", assignment));
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

void RunConfig::merge(std::istream& in) {
  std::string line;
  while (std::getline(in, line)) {
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (!line.empty()) apply(line);
  }
}

RunConfig RunConfig::parse(std::istream& in) {
  RunConfig cfg;
  cfg.merge(in);
  return cfg;
}

RunConfig RunConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidArgument(fmt::format("cannot open config '{}'", path));
  return parse(in);
}

const std::string& RunConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw InvalidArgument(fmt::format("config: unknown key '{}'", key));
  return it->second;
}

std::size_t RunConfig::get_size(const std::string& key) const { return static_cast<std::size_t>(get_u64(key)); }

std::uint64_t RunConfig::get_u64(const std::string& key) const {
  const std::string& v = get(key);
  try {
    std::size_t used = 0;
    const auto x = std::stoull(v, &used);
    if (used != v.size() || v.front() == '-') throw std::invalid_argument(v);
    return x;
  } catch (const std::logic_error&) {
    throw InvalidArgument(fmt::format("config: {} must be a nonnegative integer, got '{}'", key, v));
  }
}

double RunConfig::get_double(const std::string& key) const {
  const std::string& v = get(key);
  try {
    std::size_t used = 0;
    const double x = std::stod(v, &used);
    if (used != v.size()) throw std::invalid_argument(v);
    return x;
  } catch (const std::logic_error&) {
    throw InvalidArgument(fmt::format("config: {} must be a number, got '{}'", key, v));
  }
}

bool RunConfig::get_bool(const std::string& key) const {
  const std::string& v = get(key);
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InvalidArgument(fmt::format("config: {} must be true or false, got '{}'", key, v));
}

std::optional<std::size_t> RunConfig::get_auto_size(const std::string& key) const {
  if (get(key) == "auto") return std::nullopt;
  return get_size(key);
}

// ---------------------------------------------------------------------------
// Report

std::optional<double> ExperimentReport::summary_value(const std::string& key) const {
  for (const auto& [k, v] : summary) {
    if (k == key) return v;
  }
  return std::nullopt;
}

void ExperimentReport::write_csv(std::ostream& out) const {
  for (std::size_t i = 0; i < columns.size(); ++i) out << (i ? "," : "") << columns[i];
  out << '\n';
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << row[i];
    out << '\n';
  }
}

void ExperimentReport::write_json(std::ostream& out, bool include_timing) const {
  nlohmann::ordered_json j;
  j["config"] = config;
  nlohmann::ordered_json s = nlohmann::ordered_json::object();
  for (const auto& [k, v] : summary) {
    if (std::isfinite(v)) {
      s[k] = v;
    } else {
      s[k] = num(v);
    }
  }
  j["summary"] = s;
  j["rows"] = rows.size();
  j["falsifications"] = falsifications;
  if (include_timing) j["wall_seconds"] = wall_seconds;
  out << j.dump(1) << '\n';
}

ExperimentReport read_report_csv(std::istream& in) {
  ExperimentReport r;
  std::string line;
  auto split = [](const std::string& l) {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ls(l);
    while (std::getline(ls, cell, ',')) out.push_back(cell);
    return out;
  };
  if (!std::getline(in, line)) throw InvalidArgument("report csv: missing header");
  r.columns = split(trim(line));
  while (std::getline(in, line)) {
    line = trim(line);
    if (line.empty()) continue;
    auto row = split(line);
    if (row.size() != r.columns.size()) throw InvalidArgument("report csv: ragged row");
    r.rows.push_back(std::move(row));
  }
  return r;
}

const std::vector<std::string>& lb_columns() {
  static const std::vector<std::string> c = {"trial", "n",  "d",      "girth", "t",   "x_size", "good",
                                             "e1",    "e2", "shared", "lhs",   "rhs", "ratio",  "opt_kind"};
  return c;
}

// ---------------------------------------------------------------------------
// Inputs

ExpanderInstance load_graph_source(const std::string& source, const EigenOptions& opts) {
  auto parts = [&] {
    std::vector<std::string> out;
    std::string cell;
    std::istringstream ls(source);
    while (std::getline(ls, cell, ':')) out.push_back(cell);
    return out;
  }();
  try {
    if (parts.size() == 3 && parts[0] == "lps") {
      return lps_graph(static_cast<std::uint32_t>(std::stoul(parts[1])), static_cast<std::uint32_t>(std::stoul(parts[2])),
                       opts);
    }
    if (parts.size() == 4 && parts[0] == "random") {
      const auto seed = std::stoull(parts[3]);
      Graph g = random_regular(std::stoul(parts[1]), std::stoul(parts[2]), seed);
      auto cert = certify_regular_graph(g, ExpanderKind::kRandomRegular, opts);
      cert.seed = seed;
      return {std::move(g), cert};
    }
  } catch (const std::logic_error&) {
    throw InvalidArgument(fmt::format("graph source '{}' has a malformed number", source));
  }
  Graph g = load_graph(source);
  auto cert = certify_regular_graph(g, ExpanderKind::kRandomRegular, opts);
  return {std::move(g), cert};
}

SolutionDistribution make_solutions(const Graph& g, Vertex root, const std::string& kind, std::size_t count,
                                    std::uint64_t seed) {
  SolutionDistribution d;
  count = std::max<std::size_t>(count, 1);
  if (kind == "spt" || kind == "dfs-spt") {
    const auto spt = shortest_path_tree(g, root, unit_hop_cost());
    if (kind == "spt") {
      d.solutions.emplace_back(spt);
    } else {
      d.solutions.emplace_back(tree_to_tour(spt));
    }
  } else if (kind == "frt" || kind == "dfs-frt") {
    if (g.num_vertices() > 5000) throw InvalidArgument("frt solutions need a dense metric; graph too large");
    const MetricSpace m = shortest_path_metric(g, root);
    for (std::size_t i = 0; i < count; ++i) {
      Rng rng(derive_seed(seed, i));
      const auto tree = hst_to_spanning_tree(frt_sample(m, rng), m);
      if (kind == "frt") {
        d.solutions.emplace_back(tree);
      } else {
        d.solutions.emplace_back(tree_to_tour(tree));
      }
    }
  } else if (kind == "random-tour") {
    for (std::size_t i = 0; i < count; ++i) {
      Rng rng(derive_seed(seed, i));
      TourOrder t{root, {}};
      for (Vertex v = 0; v < g.num_vertices(); ++v) {
        if (v != root) t.order.push_back(v);
      }
      rng.shuffle(t.order);
      d.solutions.emplace_back(std::move(t));
    }
  } else {
    throw InvalidArgument(fmt::format("unknown solution kind '{}'", kind));
  }
  d.weights.assign(d.solutions.size(), 1.0 / static_cast<double>(d.solutions.size()));
  return d;
}

// ---------------------------------------------------------------------------
// Upper-bound sandwich

std::vector<UpperBoundRow> universal_upper_bound(const UpperBoundConfig& cfg) {
  if (cfg.min_points < 2 || cfg.max_points < cfg.min_points) throw InvalidArgument("upper bound: bad point range");
  if (cfg.trees == 0) throw InvalidArgument("upper bound: need at least one tree per metric");
  std::vector<std::vector<UpperBoundRow>> per_metric(cfg.metrics);
  parallel_for(cfg.metrics, cfg.workers, [&](std::size_t mi, std::size_t) {
    Rng rng(derive_seed(cfg.seed, mi));
    const std::size_t n = cfg.min_points + rng.uniform_below(cfg.max_points - cfg.min_points + 1);
    const MetricSpace m = random_metric(n, 0, cfg.max_weight, rng);
    const Vertex root = m.root();

    std::vector<SpanningTree> trees;
    std::vector<Hst> hsts;
    std::vector<double> tree_sum(n * n, 0.0);
    std::vector<double> hst_sum(n * n, 0.0);
    bool domination = true;
    bool contraction = true;
    for (std::size_t j = 0; j < cfg.trees; ++j) {
      Rng tr = rng.split(j);
      Hst h = frt_sample(m, tr);
      SpanningTree t = hst_to_spanning_tree(h, m);
      contraction = contraction && t.total_cost() <= h.total_weight() + kMetricTolerance;
      // All-pairs tree distances by one traversal per source.
      std::vector<std::vector<std::pair<Vertex, Cost>>> adj(n);
      for (Vertex v = 0; v < n; ++v) {
        if (v != root) {
          adj[v].emplace_back(t.parent(v), t.parent_cost(v));
          adj[t.parent(v)].emplace_back(v, t.parent_cost(v));
        }
      }
      std::vector<Cost> dist(n);
      std::vector<Vertex> stack;
      for (Vertex s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), -1.0);
        dist[s] = 0.0;
        stack.assign(1, s);
        while (!stack.empty()) {
          const Vertex u = stack.back();
          stack.pop_back();
          for (const auto& [w, c] : adj[u]) {
            if (dist[w] < 0.0) {
              dist[w] = dist[u] + c;
              stack.push_back(w);
            }
          }
        }
        for (Vertex v = 0; v < n; ++v) {
          tree_sum[s * n + v] += dist[v];
          const Cost hd = h.distance(s, v);
          hst_sum[s * n + v] += hd;
          if (hd + kMetricTolerance < m(s, v)) domination = false;
        }
      }
      trees.push_back(std::move(t));
      hsts.push_back(std::move(h));
    }
    const double draws = static_cast<double>(cfg.trees);
    double stretch = 0.0;
    double hst_stretch = 0.0;
    double pair_sum = 0.0;
    std::size_t pairs = 0;
    for (Vertex u = 0; u < n; ++u) {
      for (Vertex v = u + 1; v < n; ++v) {
        const double s = tree_sum[u * n + v] / draws / m(u, v);
        stretch = std::max(stretch, s);
        hst_stretch = std::max(hst_stretch, hst_sum[u * n + v] / draws / m(u, v));
        pair_sum += s;
        ++pairs;
      }
    }

    for (std::size_t si = 0; si < cfg.sets_per_metric; ++si) {
      UpperBoundRow row;
      row.metric = mi;
      row.points = n;
      row.stretch = stretch;
      row.hst_stretch = hst_stretch;
      row.mean_pair_stretch = pair_sum / static_cast<double>(pairs);
      row.domination = domination;
      row.contraction = contraction;
      const std::size_t k = 1 + rng.uniform_below(std::min(cfg.max_terminals, n - 1));
      std::vector<Vertex> pool;
      for (Vertex v = 0; v < n; ++v) {
        if (v != root) pool.push_back(v);
      }
      rng.shuffle(pool);
      const TerminalSet x = make_terminal_set({pool.begin(), pool.begin() + static_cast<std::ptrdiff_t>(k)}, root);
      row.x_size = x.size();
      row.opt = steiner_exact(m, x).cost;
      for (std::size_t j = 0; j < trees.size(); ++j) {
        const Cost tc = project_tree(trees[j], x).cost;
        const TourOrder sigma = tree_to_tour(trees[j]);
        const Cost tour = project_tour(sigma, m, x);
        row.mean_tree += tc;
        row.mean_hst += hsts[j].project(x, root);
        row.mean_tour += tour;
        row.doubling = row.doubling && tour <= 2.0 * tc + kMetricTolerance;
        // DFS of T[X] restricted to X against sigma restricted to X.
        const TourOrder sub = tree_to_tour(induced_subtree(trees[j], x));
        std::vector<Vertex> sub_order;
        for (Vertex v : sub.order) {
          if (std::binary_search(x.begin(), x.end(), v)) sub_order.push_back(v);
        }
        row.contiguity = row.contiguity && sub_order == tour_restriction(sigma, x);
      }
      row.mean_tree /= draws;
      row.mean_hst /= draws;
      row.mean_tour /= draws;
      row.stretch_bound = row.mean_tree <= row.stretch * row.opt + kMetricTolerance;
      per_metric[mi].push_back(row);
    }
  });
  std::vector<UpperBoundRow> out;
  for (auto& v : per_metric) out.insert(out.end(), v.begin(), v.end());
  return out;
}

// ---------------------------------------------------------------------------
// Pipelines

namespace {

void add_ratio_summary(ExperimentReport& rep, const std::vector<double>& ratios) {
  if (ratios.empty()) return;
  double sum = 0.0;
  for (double r : ratios) sum += r;
  rep.add_summary("ratio_mean", sum / static_cast<double>(ratios.size()));
  rep.add_summary("ratio_q10", quantile(ratios, 0.10));
  rep.add_summary("ratio_q25", quantile(ratios, 0.25));
  rep.add_summary("ratio_median", median_of(ratios));
  rep.add_summary("ratio_q75", quantile(ratios, 0.75));
  rep.add_summary("ratio_q90", quantile(ratios, 0.90));
}

void run_lower_bound(const RunConfig& cfg, ExperimentReport& rep, AdversaryKind kind) {
  const auto inst = load_graph_source(cfg.get("graph"));
  const Graph& g = inst.graph;
  const auto& cert = inst.certificate;
  const auto root = static_cast<Vertex>(cfg.get_size("root"));
  if (root >= g.num_vertices()) throw InvalidArgument("config: root outside the graph");

  LbConfig lb;
  lb.kind = kind;
  lb.root = root;
  lb.girth = cert.girth;
  lb.diameter = static_cast<Cost>(cert.diameter);
  lb.budget.steiner_max_terminals = cfg.get_size("steiner_cap");
  lb.budget.tsp_max_terminals = cfg.get_size("tsp_cap");
  lb.exact_work_limit = cfg.get_size("exact_work_limit");
  lb.trials = cfg.get_size("trials");
  lb.seed = cfg.get_u64("seed");
  lb.workers = cfg.get_size("workers");

  std::size_t t = 0;
  if (kind == AdversaryKind::kSteiner) {
    const std::size_t girth = cert.girth.value_or(0);
    t = cfg.get_auto_size("t").value_or(std::max<std::size_t>(1, girth / 3));
    lb.steiner = steiner_config_for(t);
    if (cfg.get("max_bad") != "auto") lb.steiner.max_bad = cfg.get_double("max_bad");
    if (cfg.get("min_distinct") != "auto") lb.steiner.min_distinct = cfg.get_double("min_distinct");
    lb.steiner.certificate_mode = cfg.get_bool("certificate");
  } else {
    lb.tsp = default_tsp_config(cert.n, cert.d, cfg.get_double("gamma"));
    if (auto tt = cfg.get_auto_size("t")) lb.tsp.t = *tt;
    if (auto b = cfg.get_auto_size("blocks")) lb.tsp.blocks = *b;
    lb.tsp.separation = cfg.get_double("separation");
    lb.tsp.alternation = cfg.get_double("alternation");
    t = lb.tsp.t;
  }

  const auto dist = make_solutions(g, root, cfg.get("solution"), cfg.get_size("solution_count"),
                                   derive_seed(lb.seed, 0x501));
  const auto trials = monte_carlo_lb(g, dist, lb);

  rep.columns = lb_columns();
  std::vector<double> ratios;
  std::size_t good = 0;
  std::size_t e1 = 0;
  std::size_t e2 = 0;
  std::size_t certified = 0;
  std::size_t exact = 0;
  for (const auto& r : trials) {
    rep.rows.push_back({std::to_string(r.trial), std::to_string(cert.n), std::to_string(cert.d),
                        cert.girth ? std::to_string(*cert.girth) : "", std::to_string(r.t), std::to_string(r.x_size),
                        flag(r.good), flag(r.e1), flag(r.e2), std::to_string(r.shared), num(r.lhs), num(r.rhs),
                        num(r.ratio), to_string(r.opt_kind)});
    ratios.push_back(r.ratio);
    good += r.good;
    e1 += r.e1;
    e2 += r.e2;
    certified += r.certified;
    exact += r.opt_kind == OptKind::kExact;
    if (r.certified && !r.holds) ++rep.falsifications;
    if (!r.certified && !r.holds) ++rep.falsifications;
  }
  const double n_trials = static_cast<double>(std::max<std::size_t>(trials.size(), 1));
  rep.add_summary("trials", static_cast<double>(trials.size()));
  rep.add_summary("n", static_cast<double>(cert.n));
  rep.add_summary("d", static_cast<double>(cert.d));
  rep.add_summary("t", static_cast<double>(t));
  if (kind == AdversaryKind::kSteiner) {
    rep.add_summary("good_frequency", static_cast<double>(good) / n_trials);
  } else {
    rep.add_summary("e1_frequency", static_cast<double>(e1) / n_trials);
    rep.add_summary("e2_frequency", static_cast<double>(e2) / n_trials);
  }
  rep.add_summary("certified", static_cast<double>(certified));
  rep.add_summary("certificate_failures", static_cast<double>(rep.falsifications));
  rep.add_summary("exact_fraction", static_cast<double>(exact) / n_trials);
  add_ratio_summary(rep, ratios);
}

void run_upper_bound(const RunConfig& cfg, ExperimentReport& rep) {
  UpperBoundConfig ub;
  ub.metrics = cfg.get_size("metrics");
  ub.min_points = cfg.get_size("min_points");
  ub.max_points = cfg.get_size("max_points");
  ub.max_weight = static_cast<std::uint32_t>(cfg.get_size("max_weight"));
  ub.trees = cfg.get_size("trees");
  ub.sets_per_metric = cfg.get_size("sets_per_metric");
  ub.max_terminals = cfg.get_size("max_terminals");
  ub.seed = cfg.get_u64("seed");
  ub.workers = cfg.get_size("workers");
  const auto rows = universal_upper_bound(ub);
  rep.columns = {"metric",     "n",     "x_size",        "opt",         "mean_tree",  "mean_hst",
                 "mean_tour",  "ratio", "stretch",       "pair_stretch", "hst_stretch", "domination",
                 "contraction", "doubling", "contiguity", "stretch_bound"};
  std::vector<double> ratios;
  double stretch_sum = 0.0;
  for (const auto& r : rows) {
    const double ratio = r.mean_tree / r.opt;
    ratios.push_back(ratio);
    stretch_sum += r.stretch;
    rep.rows.push_back({std::to_string(r.metric), std::to_string(r.points), std::to_string(r.x_size), num(r.opt),
                        num(r.mean_tree), num(r.mean_hst), num(r.mean_tour), num(ratio), num(r.stretch),
                        num(r.mean_pair_stretch), num(r.hst_stretch), flag(r.domination), flag(r.contraction),
                        flag(r.doubling), flag(r.contiguity), flag(r.stretch_bound)});
    if (!(r.domination && r.contraction && r.doubling && r.contiguity && r.stretch_bound)) ++rep.falsifications;
  }
  rep.add_summary("rows", static_cast<double>(rows.size()));
  if (!rows.empty()) rep.add_summary("stretch_mean", stretch_sum / static_cast<double>(rows.size()));
  add_ratio_summary(rep, ratios);
  rep.add_summary("failures", static_cast<double>(rep.falsifications));
}

void run_transfer(const RunConfig& cfg, ExperimentReport& rep) {
  if (cfg.get("mech").empty()) throw InvalidArgument("config: dp-transfer needs mech=<file>");
  std::ifstream min(cfg.get("mech"));
  if (!min) throw InvalidArgument(fmt::format("cannot open mechanism '{}'", cfg.get("mech")));
  std::optional<MetricSpace> metric;
  const MechanismTable mech = read_mechanism(min, &metric);
  const double eps = cfg.get("eps") == "auto" ? mech.epsilon() : cfg.get_double("eps");
  const auto audit = dp_audit(mech, eps);
  const auto support = empty_support_check(mech);
  rep.add_summary("eps", eps);
  rep.add_summary("audit_pass", audit.pass ? 1.0 : 0.0);
  rep.add_summary("worst_log_ratio", static_cast<double>(audit.worst_log_ratio));
  rep.add_summary("empty_support_pass", support.pass ? 1.0 : 0.0);
  rep.columns = {"k", "x_star", "pr_empty", "rho", "witness_ok", "success", "bound", "within_bound", "at_most_half"};
  if (cfg.get("witness").empty()) return;

  std::ifstream win(cfg.get("witness"));
  if (!win) throw InvalidArgument(fmt::format("cannot open witness '{}'", cfg.get("witness")));
  const LowerBoundWitness w = read_witness(win);
  const double eps0 = transfer_lower_bound(w);
  rep.add_summary("eps0", eps0);
  if (!metric || !audit.pass || eps > eps0) return;

  const GoodEvent good(mech.solutions(), *metric, w.alpha);
  auto event = [&](std::size_t id, SetMask x) { return good(id, x); };
  std::vector<Prob> empty_row(mech.num_solutions());
  for (std::size_t id = 0; id < mech.num_solutions(); ++id) empty_row[id] = mech.prob(0, id);
  for (const auto& [k, rho] : w.rho) {
    const auto yao = yao_derandomize(empty_row, uniform_sets(mech.universe(), mech.root(), k), event);
    const bool witness_ok = yao.best_prob <= rho * (1.0L + kRatioTolerance);
    const auto check = transfer_check(mech, yao.best, eps, rho, event);
    rep.rows.push_back({std::to_string(k), std::to_string(yao.best), num(static_cast<double>(yao.best_prob)),
                        num(static_cast<double>(rho)), flag(witness_ok), num(static_cast<double>(check.success)),
                        num(static_cast<double>(check.bound)), flag(check.within_bound), flag(check.at_most_half)});
    if (witness_ok && !(check.within_bound && check.at_most_half)) ++rep.falsifications;
  }
}

void write_outputs(const RunConfig& cfg, const ExperimentReport& rep) {
  if (const auto& path = cfg.get("csv"); !path.empty()) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument(fmt::format("cannot write '{}'", path));
    rep.write_csv(out);
  }
  if (const auto& path = cfg.get("json"); !path.empty()) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument(fmt::format("cannot write '{}'", path));
    rep.write_json(out);
  }
  if (const auto& path = cfg.get("plot"); !path.empty() && !rep.rows.empty()) {
    std::ofstream out(path);
    if (!out) throw InvalidArgument(fmt::format("cannot write '{}'", path));
    emit_plot_data(rep, out);
  }
}

}  // namespace

ExperimentReport run_experiment(const RunConfig& cfg) {
  const auto start = std::chrono::steady_clock::now();
  ExperimentReport rep;
  rep.config = cfg.values();
  const std::string& pipeline = cfg.get("pipeline");
  if (pipeline == "steiner-lb") {
    run_lower_bound(cfg, rep, AdversaryKind::kSteiner);
  } else if (pipeline == "tsp-lb") {
    run_lower_bound(cfg, rep, AdversaryKind::kTsp);
  } else if (pipeline == "universal-upper") {
    run_upper_bound(cfg, rep);
  } else if (pipeline == "dp-transfer") {
    run_transfer(cfg, rep);
  } else {
    throw InvalidArgument(fmt::format("config: unknown pipeline '{}'", pipeline));
  }
  rep.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  write_outputs(cfg, rep);
  return rep;
}

void emit_plot_data(const ExperimentReport& report, std::ostream& out, const std::string& kind) {
  auto col = [&](const std::string& name) -> std::optional<std::size_t> {
    const auto it = std::find(report.columns.begin(), report.columns.end(), name);
    if (it == report.columns.end()) return std::nullopt;
    return static_cast<std::size_t>(it - report.columns.begin());
  };
  const auto n_col = col("n");
  if (!n_col) throw InvalidArgument("plot data: report has no n column");
  auto value = [&](const std::vector<std::string>& row, std::size_t c) { return std::stod(row[c]); };
  out << "series,x,y,ci_lo,ci_hi\n";

  if (kind == "ratio") {
    const auto r_col = col("ratio");
    if (!r_col) throw InvalidArgument("plot data: report has no ratio column");
    std::map<double, std::vector<double>> by_n;
    for (const auto& row : report.rows) by_n[value(row, *n_col)].push_back(value(row, *r_col));
    for (auto& [n, v] : by_n) {
      std::sort(v.begin(), v.end());
      const double m = static_cast<double>(v.size());
      const double half = 0.98 * std::sqrt(m);
      const auto lo = static_cast<std::size_t>(std::max(0.0, std::floor(m / 2.0 - half)));
      const auto hi = static_cast<std::size_t>(std::min(m - 1.0, std::ceil(m / 2.0 + half)));
      out << fmt::format("n={},{},{},{},{}\n", n, n, num(median_of(v)), num(v[lo]), num(v[hi]));
    }
    return;
  }
  if (kind == "frequency" || kind == "e1") {
    const auto f_col = col(kind == "frequency" ? "good" : "e1");
    const auto t_col = col("t");
    if (!f_col || !t_col) throw InvalidArgument("plot data: report lacks t or flag columns");
    std::map<std::pair<double, double>, std::pair<std::size_t, std::size_t>> cells;
    for (const auto& row : report.rows) {
      auto& [hits, total] = cells[{value(row, *n_col), value(row, *t_col)}];
      hits += row[*f_col] == "1";
      ++total;
    }
    for (const auto& [key, ht] : cells) {
      const auto est = make_estimate(ht.second, ht.first);
      out << fmt::format("n={},{},{},{},{}\n", key.first, key.second, num(est.frequency),
                         num(std::max(0.0, est.frequency - 1.96 * est.sigma)),
                         num(std::min(1.0, est.frequency + 1.96 * est.sigma)));
    }
    return;
  }
  throw InvalidArgument(fmt::format("plot data: unknown series kind '{}'", kind));
}

}  // namespace unilb
