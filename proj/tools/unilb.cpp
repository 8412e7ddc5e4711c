// unilb command-line front end. Exit codes: 0 success, 1 usage or input
// error, 2 certificate falsification.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "unilb/error.hpp"
#include "unilb/experiment.hpp"
#include "unilb/oracles.hpp"
#include "unilb/privacy.hpp"

namespace {

constexpr int kExitUsage = 1;
constexpr int kExitFalsified = 2;

// Options shared by the pipeline subcommands; empty strings mean "not given".
struct PipelineArgs {
  std::string config;
  std::vector<std::string> sets;
  std::string graph, solution, solution_count, trials, t, seed, csv, json, plot, workers;
};

void add_pipeline_options(CLI::App* sub, PipelineArgs& a) {
  sub->add_option("--config", a.config, "key=value config file");
  sub->add_option("--set", a.sets, "override a config key (key=value), repeatable");
  sub->add_option("--seed", a.seed, "master seed (default from UNILB_SEED)");
  sub->add_option("--trials", a.trials, "trial count");
  sub->add_option("--csv", a.csv, "per-trial CSV output");
  sub->add_option("--json", a.json, "JSON report output");
  sub->add_option("--plot", a.plot, "plot-series CSV output");
  sub->add_option("--workers", a.workers, "worker threads");
}

void add_lb_options(CLI::App* sub, PipelineArgs& a) {
  add_pipeline_options(sub, a);
  sub->add_option("--graph", a.graph, "lps:P:Q, random:N:D:SEED or a graph file");
  sub->add_option("--solution", a.solution, "spt, frt, random-tour, dfs-spt or dfs-frt");
  sub->add_option("--solution-count", a.solution_count, "draws for randomized solutions");
  sub->add_option("--t", a.t, "walk length, or auto");
}

unilb::RunConfig build_config(const std::string& pipeline, const PipelineArgs& a) {
  unilb::RunConfig cfg;
  if (const char* env = std::getenv("UNILB_SEED"); env != nullptr && *env != '\0') cfg.set("seed", env);
  if (!a.config.empty()) {
    std::ifstream in(a.config);
    if (!in) throw unilb::InvalidArgument(fmt::format("cannot open config '{}'", a.config));
    cfg.merge(in);
  }
  cfg.set("pipeline", pipeline);
  const std::pair<const char*, const std::string*> flags[] = {
      {"graph", &a.graph}, {"solution", &a.solution}, {"solution_count", &a.solution_count},
      {"trials", &a.trials}, {"t", &a.t}, {"seed", &a.seed}, {"csv", &a.csv}, {"json", &a.json},
      {"plot", &a.plot}, {"workers", &a.workers}};
  for (const auto& [key, value] : flags) {
    if (!value->empty()) cfg.set(key, *value);
  }
  for (const auto& s : a.sets) cfg.apply(s);
  return cfg;
}

int run_pipeline(const unilb::RunConfig& cfg) {
  const auto rep = unilb::run_experiment(cfg);
  for (const auto& [k, v] : rep.summary) std::cout << fmt::format("{} = {}\n", k, v);
  std::cout << fmt::format("rows = {}\nfalsifications = {}\n", rep.rows.size(), rep.falsifications);
  return rep.falsifications > 0 ? kExitFalsified : 0;
}

std::vector<unilb::Vertex> parse_terminals(const std::string& text) {
  std::vector<unilb::Vertex> out;
  std::stringstream ss(text);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    if (cell.empty()) continue;
    try {
      out.push_back(static_cast<unilb::Vertex>(std::stoul(cell)));
    } catch (const std::logic_error&) {
      throw unilb::InvalidArgument(fmt::format("bad terminal '{}'", cell));
    }
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Universal Steiner tree and TSP lower-bound toolkit"};
  app.require_subcommand(1);

  // gen-expander
  auto* gen = app.add_subcommand("gen-expander", "generate an LPS or random regular graph plus certificate");
  std::string kind = "lps", out_path;
  std::uint32_t p = 5, q = 13;
  std::size_t rn = 0, rd = 0;
  std::uint64_t gseed = 1;
  gen->add_option("--kind", kind, "lps or regular")->check(CLI::IsMember({"lps", "regular"}));
  gen->add_option("--p", p, "LPS generator prime");
  gen->add_option("--q", q, "LPS field prime");
  gen->add_option("--n", rn, "vertex count (regular)");
  gen->add_option("--d", rd, "degree (regular)");
  gen->add_option("--seed", gseed, "seed (regular)");
  gen->add_option("--out", out_path, "graph file; certificate goes to <out>.cert.json")->required();

  // gen-instance
  auto* inst = app.add_subcommand("gen-instance", "write a metric file: random, or shortest paths of a graph");
  std::size_t points = 32;
  std::uint32_t max_weight = 20;
  std::uint64_t iseed = 1;
  std::string inst_graph, inst_out;
  unilb::Vertex inst_root = 0;
  inst->add_option("--points", points, "point count of a random metric");
  inst->add_option("--max-weight", max_weight, "largest random edge weight");
  inst->add_option("--seed", iseed, "seed");
  inst->add_option("--graph", inst_graph, "graph source for a shortest-path metric");
  inst->add_option("--root", inst_root, "root vertex");
  inst->add_option("--out", inst_out, "metric file")->required();

  PipelineArgs steiner_args, tsp_args, upper_args;
  auto* steiner = app.add_subcommand("run-steiner-lb", "Steiner lower-bound Monte Carlo");
  add_lb_options(steiner, steiner_args);
  auto* tsp = app.add_subcommand("run-tsp-lb", "TSP lower-bound Monte Carlo");
  add_lb_options(tsp, tsp_args);
  auto* upper = app.add_subcommand("run-universal", "FRT upper-bound sandwich on random metrics");
  add_pipeline_options(upper, upper_args);

  // oracle
  auto* oracle = app.add_subcommand("oracle", "exact Steiner tree or TSP tour on a metric file");
  std::string problem, metric_path, terminals;
  oracle->add_option("problem", problem, "steiner or tsp")->required()->check(CLI::IsMember({"steiner", "tsp"}));
  oracle->add_option("--metric", metric_path, "metric file")->required();
  oracle->add_option("--terminals", terminals, "comma-separated terminal list")->required();

  // audit-dp
  auto* audit = app.add_subcommand("audit-dp", "pointwise privacy audit of a mechanism table");
  std::string mech_path;
  double eps = 0.0;
  std::size_t distance = 1;
  audit->add_option("--mech", mech_path, "mechanism file")->required();
  audit->add_option("--eps", eps, "privacy parameter")->required();
  audit->add_option("--distance", distance, "neighbor distance (group privacy)");

  // transfer
  auto* transfer = app.add_subcommand("transfer", "privacy lower bound from an (alpha, rho) witness");
  std::string witness_path, tmech_path, teps;
  transfer->add_option("--witness", witness_path, "witness file")->required();
  transfer->add_option("--mech", tmech_path, "mechanism to check against the witness");
  transfer->add_option("--eps", teps, "privacy parameter of the mechanism");

  // report
  auto* report = app.add_subcommand("report", "plot series from a per-trial CSV");
  std::string report_csv, report_out, series = "ratio";
  report->add_option("--csv", report_csv, "per-trial CSV")->required();
  report->add_option("--kind", series, "ratio, frequency or e1")->check(CLI::IsMember({"ratio", "frequency", "e1"}));
  report->add_option("--out", report_out, "output file (stdout otherwise)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (*gen) {
      unilb::ExpanderInstance g;
      if (kind == "lps") {
        g = unilb::lps_graph(p, q);
      } else {
        if (rn == 0 || rd == 0) throw unilb::InvalidArgument("regular graphs need --n and --d");
        g.graph = unilb::random_regular(rn, rd, gseed);
        g.certificate = unilb::certify_regular_graph(g.graph, unilb::ExpanderKind::kRandomRegular);
        g.certificate.seed = gseed;
      }
      unilb::save_graph(out_path, g.graph);
      std::ofstream cert(out_path + ".cert.json");
      if (!cert) throw unilb::InvalidArgument(fmt::format("cannot write '{}.cert.json'", out_path));
      cert << g.certificate.to_json() << '\n';
      std::cout << g.certificate.to_json() << '\n';
      return 0;
    }
    if (*inst) {
      if (!inst_graph.empty()) {
        const auto g = unilb::load_graph_source(inst_graph);
        unilb::save_metric(inst_out, unilb::shortest_path_metric(g.graph, inst_root));
      } else {
        unilb::Rng rng(iseed);
        unilb::save_metric(inst_out, unilb::random_metric(points, inst_root, max_weight, rng));
      }
      return 0;
    }
    if (*steiner) return run_pipeline(build_config("steiner-lb", steiner_args));
    if (*tsp) return run_pipeline(build_config("tsp-lb", tsp_args));
    if (*upper) return run_pipeline(build_config("universal-upper", upper_args));
    if (*oracle) {
      const auto m = unilb::load_metric(metric_path);
      const auto xs = parse_terminals(terminals);
      if (problem == "steiner") {
        const auto sol = unilb::steiner_exact(m, xs);
        std::cout << fmt::format("cost = {}\nedges =", sol.cost);
        for (auto e : sol.edges) std::cout << fmt::format(" {}-{}", unilb::edge_key_low(e), unilb::edge_key_high(e));
        std::cout << '\n';
      } else {
        const auto sol = unilb::tsp_exact(m, xs);
        std::cout << fmt::format("cost = {}\norder = {}", sol.cost, m.root());
        for (auto v : sol.order) std::cout << ' ' << v;
        std::cout << ' ' << m.root() << '\n';
      }
      return 0;
    }
    if (*audit) {
      std::ifstream in(mech_path);
      if (!in) throw unilb::InvalidArgument(fmt::format("cannot open '{}'", mech_path));
      const auto mech = unilb::read_mechanism(in);
      const auto r = unilb::dp_audit(mech, eps, distance);
      std::cout << fmt::format("audit = {}\nworst_log_ratio = {}\npairs_checked = {}\n", r.pass ? "pass" : "fail",
                               static_cast<double>(r.worst_log_ratio), r.pairs_checked);
      if (!r.pass) {
        std::cout << fmt::format("worst_pair = {} {}\nworst_solution = {}\n", r.worst_a, r.worst_b, r.worst_solution);
      }
      const auto support = unilb::empty_support_check(mech);
      std::cout << fmt::format("empty_support = {}\n", support.pass ? "pass" : "fail");
      return 0;
    }
    if (*transfer) {
      if (tmech_path.empty()) {
        std::ifstream in(witness_path);
        if (!in) throw unilb::InvalidArgument(fmt::format("cannot open '{}'", witness_path));
        std::cout << fmt::format("eps0 = {}\n", unilb::transfer_lower_bound(unilb::read_witness(in)));
        return 0;
      }
      unilb::RunConfig cfg;
      cfg.set("pipeline", "dp-transfer");
      cfg.set("mech", tmech_path);
      cfg.set("witness", witness_path);
      if (!teps.empty()) cfg.set("eps", teps);
      const auto rep = unilb::run_experiment(cfg);
      for (const auto& [k, v] : rep.summary) std::cout << fmt::format("{} = {}\n", k, v);
      rep.write_csv(std::cout);
      return rep.falsifications > 0 ? kExitFalsified : 0;
    }
    if (*report) {
      std::ifstream in(report_csv);
      if (!in) throw unilb::InvalidArgument(fmt::format("cannot open '{}'", report_csv));
      const auto rep = unilb::read_report_csv(in);
      if (report_out.empty()) {
        unilb::emit_plot_data(rep, std::cout, series);
      } else {
        std::ofstream out(report_out);
        if (!out) throw unilb::InvalidArgument(fmt::format("cannot write '{}'", report_out));
        unilb::emit_plot_data(rep, out, series);
      }
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}
