#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "unilb/adversary.hpp"
#include "unilb/expander.hpp"
#include "unilb/metric.hpp"
#include "unilb/universal.hpp"

namespace unilb {

/// Flat key=value experiment configuration. Every key has a default; setting
/// a key outside the known set is an error.
class RunConfig {
 public:
  RunConfig();

  // Parse "key=value" lines; '#' starts a comment, blank lines are skipped.
  static RunConfig parse(std::istream& in);
  static RunConfig load(const std::string& path);
  // Apply the lines of a config stream on top of the current values.
  void merge(std::istream& in);

  // Throws InvalidArgument for unknown keys.
  void set(const std::string& key, const std::string& value);
  // "key=value" form of set().
  void apply(const std::string& assignment);

  const std::string& get(const std::string& key) const;
  std::size_t get_size(const std::string& key) const;
  std::uint64_t get_u64(const std::string& key) const;
  double get_double(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  // Empty optional when the value is "auto".
  std::optional<std::size_t> get_auto_size(const std::string& key) const;

  const std::map<std::string, std::string>& values() const noexcept { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

/// Tidy result table plus aggregates.
struct ExperimentReport {
  std::map<std::string, std::string> config;
  std::vector<std::string> columns;
  std::vector<std::vector<std::string>> rows;
  // Aggregates in insertion order.
  std::vector<std::pair<std::string, double>> summary;
  std::size_t falsifications = 0;
  double wall_seconds = 0.0;

  void add_summary(const std::string& key, double value) { summary.emplace_back(key, value); }
  std::optional<double> summary_value(const std::string& key) const;

  void write_csv(std::ostream& out) const;
  // Excludes wall-clock time unless asked, so reruns compare equal.
  void write_json(std::ostream& out, bool include_timing = true) const;
};

// Column schema of the lower-bound pipelines.
const std::vector<std::string>& lb_columns();

// Graph named by a source string: "lps:P:Q", "random:N:D:SEED" or a file path.
ExpanderInstance load_graph_source(const std::string& source, const EigenOptions& opts = {});

// Solution distribution over g named by kind: spt, frt (count draws, needs a
// dense metric), random-tour (count uniform tours), dfs-spt, dfs-frt.
SolutionDistribution make_solutions(const Graph& g, Vertex root, const std::string& kind, std::size_t count,
                                    std::uint64_t seed);

/// Upper-bound sandwich on random metrics.
struct UpperBoundConfig {
  std::size_t metrics = 100;
  std::size_t min_points = 32;
  std::size_t max_points = 64;
  std::uint32_t max_weight = 20;
  std::size_t trees = 32;           // FRT draws per metric
  std::size_t sets_per_metric = 4;  // terminal sets per metric
  std::size_t max_terminals = 10;
  std::uint64_t seed = 0;
  std::size_t workers = 1;
};

struct UpperBoundRow {
  std::size_t metric = 0;
  std::size_t points = 0;
  std::size_t x_size = 0;
  Cost opt = 0.0;
  Cost mean_tree = 0.0;    // E[c(T[X])] over the draws
  Cost mean_hst = 0.0;     // E[c(HST[X])]
  Cost mean_tour = 0.0;    // E[c(sigma_X)]
  double stretch = 0.0;    // max over pairs of the mean tree stretch
  double mean_pair_stretch = 0.0;
  double hst_stretch = 0.0;  // max over pairs of the mean HST stretch
  bool domination = true;    // HST distance >= metric distance, every pair, every draw
  bool contraction = true;   // tree cost <= HST weight, every draw
  bool doubling = true;      // c(sigma_X) <= 2 c(T[X]), every draw
  bool contiguity = true;    // DFS order of T[X] equals sigma restricted to X, every draw
  bool stretch_bound = true; // mean_tree <= stretch * opt
};

std::vector<UpperBoundRow> universal_upper_bound(const UpperBoundConfig& cfg);

// Runs the pipeline named by "pipeline": steiner-lb, tsp-lb, universal-upper
// or dp-transfer. Writes the csv/json/plot outputs named in the config.
ExperimentReport run_experiment(const RunConfig& cfg);

// series,x,y,ci_lo,ci_hi. kind "ratio": one series per graph size, median
// ratio with an order-statistic 95% interval. kind "frequency": good-walk or
// E1 frequency against t with a normal-approximation interval.
void emit_plot_data(const ExperimentReport& report, std::ostream& out, const std::string& kind = "ratio");

// Read back a CSV written by write_csv (config and summary are not stored).
ExperimentReport read_report_csv(std::istream& in);

}  // namespace unilb
