#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "unilb/metric.hpp"
#include "unilb/universal.hpp"

namespace unilb {

// Terminal sets over a small universe {0, ..., u-1} are bitmasks.
using SetMask = std::uint32_t;
using Prob = long double;

inline constexpr std::size_t kMaxUniverse = 16;
inline constexpr long double kRatioTolerance = 1e-9L;
inline constexpr long double kNormTolerance = 1e-12L;

std::size_t mask_size(SetMask x);
std::vector<Vertex> mask_vertices(SetMask x);
SetMask vertices_mask(const std::vector<Vertex>& xs);

/// Explicit finite mechanism: a distribution over registered solutions for
/// every terminal set X of the universe.
class MechanismTable {
 public:
  MechanismTable() = default;
  MechanismTable(std::size_t universe, Vertex root, std::vector<Solution> solutions, double epsilon = 0.0);

  std::size_t universe() const noexcept { return universe_; }
  Vertex root() const noexcept { return root_; }
  double epsilon() const noexcept { return epsilon_; }
  void set_epsilon(double eps) noexcept { epsilon_ = eps; }
  std::size_t num_sets() const noexcept { return std::size_t{1} << universe_; }
  std::size_t num_solutions() const noexcept { return solutions_.size(); }
  const std::vector<Solution>& solutions() const noexcept { return solutions_; }
  const Solution& solution(std::size_t id) const { return solutions_.at(id); }

  Prob prob(SetMask x, std::size_t id) const { return probs_[x * solutions_.size() + id]; }
  void set_prob(SetMask x, std::size_t id, Prob p) { probs_[x * solutions_.size() + id] = p; }
  // Copy one distribution into every row.
  void fill_all(const std::vector<Prob>& dist);

  // Throws InvalidArgument on a row that is negative or does not sum to 1
  // (within kNormTolerance), or on support solutions infeasible for their X.
  void validate() const;

 private:
  std::size_t universe_ = 0;
  Vertex root_ = 0;
  double epsilon_ = 0.0;
  std::vector<Solution> solutions_;
  std::vector<Prob> probs_;
};

// Whether s can serve terminal set x: a tree or path collection reaching every
// vertex of x, or a tour listing every non-root vertex of x.
bool feasible_for(const Solution& s, SetMask x, Vertex root);

struct DpAuditResult {
  bool pass = true;
  // Largest |ln(p/q)| over checked pairs; infinity when some p > 0 = q.
  long double worst_log_ratio = 0.0L;
  SetMask worst_a = 0;
  SetMask worst_b = 0;
  std::size_t worst_solution = 0;
  std::size_t pairs_checked = 0;
};

// Pointwise check of exp(-k eps) <= Pr_X[s] / Pr_X'[s] <= exp(k eps) over all
// pairs at symmetric-difference distance k; 0/0 passes, p/0 fails.
DpAuditResult dp_audit(const MechanismTable& mech, double eps, std::size_t distance = 1);

double group_privacy(double eps, std::size_t k);

// Pr_X[s] proportional to exp(-eps * cost(X, s) / (2 * sensitivity)).
using SetCost = std::function<Cost(SetMask, std::size_t)>;
MechanismTable exponential_mechanism(std::size_t universe, Vertex root, std::vector<Solution> solutions,
                                     const SetCost& cost, double eps, double sensitivity);

struct EmptySupportResult {
  bool pass = true;
  std::vector<std::size_t> infeasible;  // ids with mass at X = {} that do not serve U
};

EmptySupportResult empty_support_check(const MechanismTable& mech);

struct YaoResult {
  SetMask best = 0;
  Prob best_prob = 0.0L;  // Pr_s[event(s, best)]
  Prob average = 0.0L;    // sum_X pi_X Pr_s[event(s, X)], equal to the interchanged sum
};

// Minimizes Pr_{s ~ solution_probs}[event(s, X)] over the support of set_probs.
YaoResult yao_derandomize(const std::vector<Prob>& solution_probs,
                          const std::vector<std::pair<SetMask, Prob>>& set_probs,
                          const std::function<bool(std::size_t, SetMask)>& event);

/// (alpha, rho) lower bound: rho maps |X| to the probability bound.
struct LowerBoundWitness {
  double alpha = 1.0;
  std::map<std::size_t, Prob> rho;
  // Optional hard set per size, as found by derandomization.
  std::map<std::size_t, SetMask> sets;
};

// inf over witness sizes k of ln(1 / (2 rho(k))) / k. Nonpositive values mean
// the transfer is vacuous. Throws on an empty table, rho outside [0, 1], or
// rho increasing in k.
double transfer_lower_bound(const LowerBoundWitness& w);

struct TransferCheck {
  Prob success = 0.0L;  // Pr_{s ~ D_X}[good(s, X)]
  Prob bound = 0.0L;    // exp(eps |X|) rho(|X|)
  bool within_bound = false;
  bool at_most_half = false;
};

TransferCheck transfer_check(const MechanismTable& mech, SetMask x, double eps, Prob rho,
                             const std::function<bool(std::size_t, SetMask)>& good);

/// good(s, X): the projected cost of solution s at X is at most alpha times
/// the exact optimum for X (tour optimum for tours, Steiner optimum otherwise).
/// Optima are computed once per set and cached.
class GoodEvent {
 public:
  GoodEvent(std::vector<Solution> solutions, const MetricSpace& m, double alpha);
  bool operator()(std::size_t id, SetMask x) const;
  Cost steiner_opt(SetMask x) const;
  Cost tour_opt(SetMask x) const;

 private:
  std::vector<Solution> solutions_;
  const MetricSpace* m_;
  double alpha_;
  mutable std::vector<Cost> steiner_;
  mutable std::vector<Cost> tour_;
};

// Every ordering of the non-root vertices of {0, ..., universe-1}, in lexicographic order.
std::vector<Solution> all_tours(std::size_t universe, Vertex root);

// rho(k) = max over solutions of the fraction of size-k non-root sets on which
// the solution is good; exact by enumeration.
std::map<std::size_t, Prob> exact_rho(const GoodEvent& good, std::size_t num_solutions, std::size_t universe,
                                      Vertex root, const std::vector<std::size_t>& sizes);

// Uniform distribution over the non-root sets of size k.
std::vector<std::pair<SetMask, Prob>> uniform_sets(std::size_t universe, Vertex root, std::size_t k);

// JSON I/O. Mechanism rows are strings "mask: id=prob,id=prob"; an optional
// "metric" table prices tree and path edges (unit costs otherwise).
void write_mechanism(std::ostream& out, const MechanismTable& mech, const std::optional<MetricSpace>& metric = {});
// The embedded metric, when present, is stored in *metric.
MechanismTable read_mechanism(std::istream& in, std::optional<MetricSpace>* metric = nullptr);
void write_witness(std::ostream& out, const LowerBoundWitness& w);
LowerBoundWitness read_witness(std::istream& in);

}  // namespace unilb
