#include "unilb/privacy.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

#include "json.hpp"
#include "unilb/error.hpp"
#include "unilb/oracles.hpp"

namespace unilb {

using json = nlohmann::ordered_json;

std::size_t mask_size(SetMask x) { return static_cast<std::size_t>(std::popcount(x)); }

std::vector<Vertex> mask_vertices(SetMask x) {
  std::vector<Vertex> out;
  for (Vertex v = 0; x != 0; ++v, x >>= 1) {
    if (x & 1U) out.push_back(v);
  }
  return out;
}

SetMask vertices_mask(const std::vector<Vertex>& xs) {
  SetMask m = 0;
  for (Vertex v : xs) {
    if (v >= kMaxUniverse) throw InvalidArgument(fmt::format("set mask: vertex {} outside the universe cap", v));
    m |= SetMask{1} << v;
  }
  return m;
}

MechanismTable::MechanismTable(std::size_t universe, Vertex root, std::vector<Solution> solutions, double epsilon)
    : universe_(universe), root_(root), epsilon_(epsilon), solutions_(std::move(solutions)) {
  if (universe_ == 0 || universe_ > kMaxUniverse) {
    throw InvalidArgument(fmt::format("mechanism: universe size {} outside [1, {}]", universe_, kMaxUniverse));
  }
  if (root_ >= universe_) throw InvalidArgument("mechanism: root outside the universe");
  if (solutions_.empty()) throw InvalidArgument("mechanism: empty solution registry");
  probs_.assign(num_sets() * solutions_.size(), 0.0L);
}

void MechanismTable::fill_all(const std::vector<Prob>& dist) {
  if (dist.size() != solutions_.size()) throw InvalidArgument("mechanism: distribution length mismatch");
  for (std::size_t x = 0; x < num_sets(); ++x) std::copy(dist.begin(), dist.end(), probs_.begin() + x * dist.size());
}

bool feasible_for(const Solution& s, SetMask x, Vertex root) {
  const auto xs = mask_vertices(x);
  if (const auto* t = std::get_if<SpanningTree>(&s)) {
    return std::all_of(xs.begin(), xs.end(), [&](Vertex v) { return t->contains(v); });
  }
  if (const auto* p = std::get_if<PathCollection>(&s)) {
    return std::all_of(xs.begin(), xs.end(), [&](Vertex v) { return v < p->num_vertices() && p->covers(v); });
  }
  const auto& order = std::get<TourOrder>(s).order;
  return std::all_of(xs.begin(), xs.end(), [&](Vertex v) {
    return v == root || std::find(order.begin(), order.end(), v) != order.end();
  });
}

void MechanismTable::validate() const {
  const std::size_t k = solutions_.size();
  for (SetMask x = 0; x < num_sets(); ++x) {
    Prob sum = 0.0L;
    for (std::size_t id = 0; id < k; ++id) {
      const Prob p = prob(x, id);
      if (!(p >= 0.0L)) throw InvalidArgument(fmt::format("mechanism: negative probability at X={} id={}", x, id));
      if (p > 0.0L && !feasible_for(solutions_[id], x, root_)) {
        throw InvalidArgument(fmt::format("mechanism: solution {} in the support of X={} does not serve X", id, x));
      }
      sum += p;
    }
    if (std::fabs(sum - 1.0L) > kNormTolerance) {
      throw InvalidArgument(fmt::format("mechanism: distribution at X={} sums to {}", x, static_cast<double>(sum)));
    }
  }
}

DpAuditResult dp_audit(const MechanismTable& mech, double eps, std::size_t distance) {
  if (distance == 0 || distance > mech.universe()) throw InvalidArgument("dp_audit: distance outside [1, |U|]");
  if (!(eps >= 0.0)) throw InvalidArgument("dp_audit: epsilon must be nonnegative");
  const long double limit = static_cast<long double>(distance) * eps + std::log1p(kRatioTolerance);
  std::vector<SetMask> flips;
  for (SetMask c = 1; c < mech.num_sets(); ++c) {
    if (mask_size(c) == distance) flips.push_back(c);
  }
  DpAuditResult r;
  auto note_worst = [&](long double lr, SetMask a, SetMask b, std::size_t id) {
    if (lr > r.worst_log_ratio) {
      r.worst_log_ratio = lr;
      r.worst_a = a;
      r.worst_b = b;
      r.worst_solution = id;
    }
  };
  for (SetMask a = 0; a < mech.num_sets(); ++a) {
    for (SetMask c : flips) {
      const SetMask b = a ^ c;
      if (b < a) continue;
      ++r.pairs_checked;
      for (std::size_t id = 0; id < mech.num_solutions(); ++id) {
        const Prob p = mech.prob(a, id);
        const Prob q = mech.prob(b, id);
        if (p == 0.0L && q == 0.0L) continue;
        if (p == 0.0L || q == 0.0L) {
          note_worst(std::numeric_limits<long double>::infinity(), a, b, id);
          continue;
        }
        note_worst(std::fabs(std::log(p) - std::log(q)), a, b, id);
      }
    }
  }
  r.pass = r.worst_log_ratio <= limit;
  return r;
}

double group_privacy(double eps, std::size_t k) {
  if (k == 0) throw InvalidArgument("group_privacy: k must be at least 1");
  return static_cast<double>(k) * eps;
}

MechanismTable exponential_mechanism(std::size_t universe, Vertex root, std::vector<Solution> solutions,
                                     const SetCost& cost, double eps, double sensitivity) {
  if (!(sensitivity > 0.0)) throw InvalidArgument("exponential_mechanism: sensitivity must be positive");
  if (!(eps >= 0.0)) throw InvalidArgument("exponential_mechanism: epsilon must be nonnegative");
  MechanismTable mech(universe, root, std::move(solutions), eps);
  const std::size_t k = mech.num_solutions();
  std::vector<long double> c(k);
  for (SetMask x = 0; x < mech.num_sets(); ++x) {
    for (std::size_t id = 0; id < k; ++id) {
      c[id] = cost(x, id);
      if (!std::isfinite(static_cast<double>(c[id]))) throw InvalidArgument("exponential_mechanism: cost must be finite");
    }
    // Shift by the minimum so the largest weight is exactly 1.
    const long double lo = *std::min_element(c.begin(), c.end());
    long double z = 0.0L;
    for (std::size_t id = 0; id < k; ++id) {
      c[id] = std::exp(-static_cast<long double>(eps) * (c[id] - lo) / (2.0L * sensitivity));
      z += c[id];
    }
    for (std::size_t id = 0; id < k; ++id) mech.set_prob(x, id, c[id] / z);
  }
  return mech;
}

EmptySupportResult empty_support_check(const MechanismTable& mech) {
  EmptySupportResult r;
  const SetMask full = static_cast<SetMask>(mech.num_sets() - 1);
  for (std::size_t id = 0; id < mech.num_solutions(); ++id) {
    if (mech.prob(0, id) > 0.0L && !feasible_for(mech.solution(id), full, mech.root())) r.infeasible.push_back(id);
  }
  r.pass = r.infeasible.empty();
  return r;
}

YaoResult yao_derandomize(const std::vector<Prob>& solution_probs,
                          const std::vector<std::pair<SetMask, Prob>>& set_probs,
                          const std::function<bool(std::size_t, SetMask)>& event) {
  if (set_probs.empty()) throw InvalidArgument("yao_derandomize: empty set distribution");
  YaoResult r;
  r.best_prob = std::numeric_limits<long double>::infinity();
  for (const auto& [x, px] : set_probs) {
    if (px <= 0.0L) continue;
    Prob p = 0.0L;
    for (std::size_t s = 0; s < solution_probs.size(); ++s) {
      if (solution_probs[s] > 0.0L && event(s, x)) p += solution_probs[s];
    }
    if (p < r.best_prob) {
      r.best_prob = p;
      r.best = x;
    }
  }
  // The averaged bound, summed with solutions outermost.
  for (std::size_t s = 0; s < solution_probs.size(); ++s) {
    if (solution_probs[s] <= 0.0L) continue;
    Prob inner = 0.0L;
    for (const auto& [x, px] : set_probs) {
      if (px > 0.0L && event(s, x)) inner += px;
    }
    r.average += solution_probs[s] * inner;
  }
  return r;
}

double transfer_lower_bound(const LowerBoundWitness& w) {
  if (w.rho.empty()) throw InvalidArgument("transfer_lower_bound: empty witness table");
  double eps0 = std::numeric_limits<double>::infinity();
  Prob previous = 1.0L;
  for (const auto& [k, rho] : w.rho) {
    if (k == 0) throw InvalidArgument("transfer_lower_bound: witness sizes start at 1");
    if (!(rho >= 0.0L && rho <= 1.0L)) throw InvalidArgument(fmt::format("transfer_lower_bound: rho({}) outside [0, 1]", k));
    if (rho > previous * (1.0L + kRatioTolerance)) {
      throw InvalidArgument(fmt::format("transfer_lower_bound: rho increases at size {}", k));
    }
    previous = rho;
    if (rho == 0.0L) continue;
    const long double term = std::log(1.0L / (2.0L * rho)) / static_cast<long double>(k);
    eps0 = std::min(eps0, static_cast<double>(term));
  }
  return eps0;
}

TransferCheck transfer_check(const MechanismTable& mech, SetMask x, double eps, Prob rho,
                             const std::function<bool(std::size_t, SetMask)>& good) {
  TransferCheck r;
  for (std::size_t id = 0; id < mech.num_solutions(); ++id) {
    const Prob p = mech.prob(x, id);
    if (p > 0.0L && good(id, x)) r.success += p;
  }
  const SetMask terminals = x & ~(SetMask{1} << mech.root());
  r.bound = std::exp(static_cast<long double>(eps) * static_cast<long double>(mask_size(terminals))) * rho;
  r.within_bound = r.success <= r.bound * (1.0L + kRatioTolerance);
  r.at_most_half = r.bound <= 0.5L * (1.0L + kRatioTolerance);
  return r;
}

GoodEvent::GoodEvent(std::vector<Solution> solutions, const MetricSpace& m, double alpha)
    : solutions_(std::move(solutions)), m_(&m), alpha_(alpha) {
  if (m.size() > kMaxUniverse) throw InvalidArgument("good event: metric exceeds the universe cap");
  const std::size_t sets = std::size_t{1} << m.size();
  steiner_.assign(sets, -1.0);
  tour_.assign(sets, -1.0);
}

Cost GoodEvent::steiner_opt(SetMask x) const {
  if (steiner_[x] < 0.0) steiner_[x] = steiner_exact(*m_, mask_vertices(x)).cost;
  return steiner_[x];
}

Cost GoodEvent::tour_opt(SetMask x) const {
  if (tour_[x] < 0.0) tour_[x] = tsp_exact(*m_, mask_vertices(x)).cost;
  return tour_[x];
}

bool GoodEvent::operator()(std::size_t id, SetMask x) const {
  const Solution& s = solutions_.at(id);
  const auto xs = mask_vertices(x);
  const Cost opt = std::holds_alternative<TourOrder>(s) ? tour_opt(x) : steiner_opt(x);
  return projected_cost(s, metric_hop_cost(*m_), xs) <= alpha_ * opt + kMetricTolerance;
}

std::vector<Solution> all_tours(std::size_t universe, Vertex root) {
  std::vector<Vertex> perm;
  for (Vertex v = 0; v < universe; ++v) {
    if (v != root) perm.push_back(v);
  }
  std::vector<Solution> out;
  do {
    out.emplace_back(TourOrder{root, perm});
  } while (std::next_permutation(perm.begin(), perm.end()));
  return out;
}

std::vector<std::pair<SetMask, Prob>> uniform_sets(std::size_t universe, Vertex root, std::size_t k) {
  std::vector<SetMask> sets;
  for (SetMask x = 0; x < (SetMask{1} << universe); ++x) {
    if (!(x >> root & 1U) && mask_size(x) == k) sets.push_back(x);
  }
  std::vector<std::pair<SetMask, Prob>> out;
  for (SetMask x : sets) out.emplace_back(x, 1.0L / static_cast<Prob>(sets.size()));
  return out;
}

std::map<std::size_t, Prob> exact_rho(const GoodEvent& good, std::size_t num_solutions, std::size_t universe,
                                      Vertex root, const std::vector<std::size_t>& sizes) {
  std::map<std::size_t, Prob> rho;
  for (std::size_t k : sizes) {
    const auto sets = uniform_sets(universe, root, k);
    if (sets.empty()) throw InvalidArgument(fmt::format("exact_rho: no sets of size {}", k));
    Prob best = 0.0L;
    for (std::size_t id = 0; id < num_solutions; ++id) {
      Prob p = 0.0L;
      for (const auto& [x, px] : sets) {
        if (good(id, x)) p += px;
      }
      best = std::max(best, p);
    }
    rho[k] = best;
  }
  return rho;
}

// ---------------------------------------------------------------------------
// I/O

namespace {

json solution_to_json(const Solution& s) {
  json j;
  j["kind"] = solution_kind(s);
  if (const auto* t = std::get_if<SpanningTree>(&s)) {
    json parent = json::array();
    for (Vertex v = 0; v < t->num_vertices(); ++v) {
      if (t->contains(v)) {
        parent.push_back(t->parent(v));
      } else {
        parent.push_back(-1);
      }
    }
    j["parent"] = parent;
  } else if (const auto* p = std::get_if<PathCollection>(&s)) {
    json paths = json::array();
    for (Vertex v = 0; v < p->num_vertices(); ++v) paths.push_back(p->path(v).vertices);
    j["paths"] = paths;
  } else {
    j["order"] = std::get<TourOrder>(s).order;
  }
  return j;
}

Solution solution_from_json(const json& j, Vertex root, const HopCost& hop) {
  const std::string kind = j.at("kind").get<std::string>();
  if (kind == "tour") {
    TourOrder t;
    t.root = root;
    t.order = j.at("order").get<std::vector<Vertex>>();
    return t;
  }
  if (kind == "tree") {
    std::vector<Vertex> parent;
    for (const auto& p : j.at("parent")) {
      const auto v = p.get<long long>();
      parent.push_back(v < 0 ? kNoVertex : static_cast<Vertex>(v));
    }
    return SpanningTree(root, std::move(parent), hop);
  }
  if (kind == "paths") {
    return make_path_collection(root, j.at("paths").get<std::vector<std::vector<Vertex>>>(), hop);
  }
  throw InvalidArgument(fmt::format("mechanism file: unknown solution kind '{}'", kind));
}

}  // namespace

void write_mechanism(std::ostream& out, const MechanismTable& mech, const std::optional<MetricSpace>& metric) {
  json j;
  j["universe"] = mech.universe();
  j["root"] = mech.root();
  j["epsilon"] = mech.epsilon();
  if (metric) {
    json rows = json::array();
    for (Vertex u = 0; u < metric->size(); ++u) {
      const auto r = metric->row(u);
      rows.push_back(std::vector<Cost>(r.begin(), r.end()));
    }
    j["metric"] = rows;
  }
  json sols = json::array();
  for (const auto& s : mech.solutions()) sols.push_back(solution_to_json(s));
  j["solutions"] = sols;
  json rows = json::array();
  for (SetMask x = 0; x < mech.num_sets(); ++x) {
    std::string line = fmt::format("{}:", x);
    bool first = true;
    for (std::size_t id = 0; id < mech.num_solutions(); ++id) {
      const Prob p = mech.prob(x, id);
      if (p == 0.0L) continue;
      line += fmt::format("{}{}={:.21g}", first ? " " : ",", id, p);
      first = false;
    }
    rows.push_back(line);
  }
  j["rows"] = rows;
  out << j.dump(1) << '\n';
}

MechanismTable read_mechanism(std::istream& in, std::optional<MetricSpace>* metric_out) {
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw InvalidArgument(fmt::format("mechanism file: {}", e.what()));
  }
  try {
    const auto universe = j.at("universe").get<std::size_t>();
    const auto root = j.at("root").get<Vertex>();
    std::optional<MetricSpace> metric;
    if (j.contains("metric")) {
      const auto rows = j.at("metric").get<std::vector<std::vector<Cost>>>();
      std::vector<Cost> table;
      for (const auto& r : rows) {
        if (r.size() != rows.size()) throw InvalidArgument("mechanism file: metric must be square");
        table.insert(table.end(), r.begin(), r.end());
      }
      metric.emplace(rows.size(), root, std::move(table));
    }
    const HopCost hop = metric ? metric_hop_cost(*metric) : unit_hop_cost();
    std::vector<Solution> sols;
    for (const auto& s : j.at("solutions")) sols.push_back(solution_from_json(s, root, hop));
    MechanismTable mech(universe, root, std::move(sols), j.value("epsilon", 0.0));
    const auto& rows = j.at("rows");
    if (rows.size() != mech.num_sets()) {
      throw InvalidArgument(fmt::format("mechanism file: {} rows, expected {}", rows.size(), mech.num_sets()));
    }
    std::vector<bool> seen(mech.num_sets(), false);
    for (const auto& row : rows) {
      const auto line = row.get<std::string>();
      const auto colon = line.find(':');
      if (colon == std::string::npos) throw InvalidArgument(fmt::format("mechanism file: bad row '{}'", line));
      const auto x = static_cast<SetMask>(std::stoul(line.substr(0, colon)));
      if (x >= mech.num_sets() || seen[x]) throw InvalidArgument(fmt::format("mechanism file: bad or repeated set {}", x));
      seen[x] = true;
      std::istringstream entries(line.substr(colon + 1));
      std::string entry;
      while (std::getline(entries, entry, ',')) {
        const auto eq = entry.find('=');
        if (eq == std::string::npos) throw InvalidArgument(fmt::format("mechanism file: bad entry '{}'", entry));
        const auto id = std::stoul(entry.substr(0, eq));
        if (id >= mech.num_solutions()) throw InvalidArgument(fmt::format("mechanism file: unknown solution id {}", id));
        mech.set_prob(x, id, std::stold(entry.substr(eq + 1)));
      }
    }
    mech.validate();
    if (metric_out) *metric_out = std::move(metric);
    return mech;
  } catch (const json::exception& e) {
    throw InvalidArgument(fmt::format("mechanism file: {}", e.what()));
  } catch (const std::logic_error& e) {
    throw InvalidArgument(fmt::format("mechanism file: {}", e.what()));
  }
}

void write_witness(std::ostream& out, const LowerBoundWitness& w) {
  json j;
  j["alpha"] = w.alpha;
  json rho = json::object();
  for (const auto& [k, r] : w.rho) rho[std::to_string(k)] = fmt::format("{:.21g}", r);
  j["rho"] = rho;
  if (!w.sets.empty()) {
    json sets = json::object();
    for (const auto& [k, x] : w.sets) sets[std::to_string(k)] = x;
    j["sets"] = sets;
  }
  out << j.dump(1) << '\n';
}

LowerBoundWitness read_witness(std::istream& in) {
  try {
    json j;
    in >> j;
    LowerBoundWitness w;
    w.alpha = j.value("alpha", 1.0);
    for (const auto& [k, v] : j.at("rho").items()) {
      w.rho[std::stoul(k)] = v.is_string() ? std::stold(v.get<std::string>()) : v.get<double>();
    }
    if (j.contains("sets")) {
      for (const auto& [k, v] : j.at("sets").items()) w.sets[std::stoul(k)] = v.get<SetMask>();
    }
    return w;
  } catch (const json::exception& e) {
    throw InvalidArgument(fmt::format("witness file: {}", e.what()));
  } catch (const std::logic_error& e) {
    throw InvalidArgument(fmt::format("witness file: {}", e.what()));
  }
}

}  // namespace unilb
