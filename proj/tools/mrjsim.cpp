#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "mrjsim/discretization.hpp"
#include "mrjsim/dominance.hpp"
#include "mrjsim/error.hpp"
#include "mrjsim/experiment.hpp"
#include "mrjsim/text.hpp"
#include "mrjsim/trace.hpp"

namespace {

using namespace mrjsim;

// Fills options not given on the command line from a key = value file.
void apply_config(CLI::App* cmd, const std::string& path) {
  if (path.empty()) return;
  auto kv = load_key_values(path);
  for (CLI::Option* opt : cmd->get_options()) {
    const std::string key = opt->get_single_name();
    auto it = kv.find(key);
    if (it == kv.end()) continue;
    const std::string value = it->second;
    kv.erase(it);
    if (opt->count() > 0) continue;
    if (opt->get_type_size_max() == 0) {
      if (value == "true" || value == "1") {
        opt->add_result("true");
        opt->run_callback();
      } else if (value != "false" && value != "0") {
        throw ConfigError(key + ": expected true or false");
      }
      continue;
    }
    if (opt->get_items_expected_max() > 1)
      opt->add_result(split_list(value));
    else
      opt->add_result(value);
    opt->run_callback();
  }
  kv.erase("config");
  if (!kv.empty()) throw ConfigError("unknown config key \"" + kv.begin()->first + "\"");
}

void write_output(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("out: cannot write " + path);
  f << text;
}

struct SimOptions {
  std::string config;
  ExperimentConfig exp;
  std::vector<double> lambdas;
  std::vector<double> rhos;
  double lambda_star = 0.0;
  std::string out;
};

void add_sim_options(CLI::App* cmd, SimOptions& o, bool trace) {
  cmd->add_option("--config", o.config, "key = value file; command-line flags take precedence");
  if (!trace)
    cmd->add_option("--dist", o.exp.distribution, "requirement law, e.g. uniform, lomax(2,1), uniform*uniform");
  cmd->add_option("--lambda", o.lambdas, "arrival rates")->delimiter(',');
  if (!trace) cmd->add_option("--rho", o.rhos, "loads lambda/lambda*")->delimiter(',');
  cmd->add_option("--lambda-star", o.lambda_star, "stability boundary used for rho");
  cmd->add_option("--policies", o.exp.policies, "policies as name or name:K")->delimiter(',');
  cmd->add_option("--K", o.exp.K, "K for discretized policies without :K");
  cmd->add_option("--jobs", o.exp.jobs, "arrivals per run");
  cmd->add_option("--seed", o.exp.seed, "base seed; load i runs with seed + i");
  cmd->add_option("--workers", o.exp.workers, "parallel runs");
  cmd->add_option("--out", o.out, "CSV path (stdout when omitted)");
  cmd->add_option("--theta", o.exp.theta, "nMSR switch rate");
  cmd->add_option("--epsilon", o.exp.epsilon, "nMSR construction slack");
  cmd->add_option("--queue-cutoff", o.exp.queue_cutoff, "instability cutoff on jobs in system");
  cmd->add_option("--mrt-cutoff", o.exp.mrt_cutoff, "instability cutoff on mean response time");
}

void finish_sim_options(SimOptions& o) {
  o.exp.lambdas = o.lambdas;
  o.exp.rhos = o.rhos;
  if (o.lambda_star > 0.0) o.exp.lambda_star = o.lambda_star;
  if (o.exp.workers == 0) o.exp.workers = 1;
}

int report_rows(const std::vector<ResultRow>& rows, const std::string& out) {
  write_output(out, format_csv(rows));
  for (const auto& r : rows)
    if (!r.error.empty()) std::cerr << "run failed: " << r.policy << " lambda=" << format_double(r.lambda) << ": " << r.error << "\n";
  return 0;
}

Grid grid_from(const std::vector<int>& ks, int dimension) {
  if (ks.empty()) throw ConfigError("K: required");
  if (ks.size() == 1) return Grid::uniform(ks[0], dimension);
  if (static_cast<int>(ks.size()) != dimension) throw ConfigError("K: one value per resource is required");
  return Grid(ks);
}

CandidateSet candidate_set(const std::string& set, const Grid& grid, std::size_t cap) {
  if (set == "full") return enumerate_candidates(grid, cap);
  if (set == "2j") return efficient_set_2J(grid);
  if (set == "2b") {
    if (grid.dimension() != 1 || !is_power_of_two(grid.k(0))) throw ConfigError("K must be a power of two");
    return efficient_set_2B(grid);
  }
  if (set == "xp") {
    if (grid.dimension() != 1 || grid.k(0) % 2 != 0) throw ConfigError("K must be even");
    return efficient_set_XP(grid, cap);
  }
  throw ConfigError("set: expected full, 2j, 2b or xp");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multiresource-job queue simulator and stability toolkit"};
  app.require_subcommand(1);

  SimOptions sim;
  auto* simulate = app.add_subcommand("simulate", "mean response time versus load");
  add_sim_options(simulate, sim, false);

  SimOptions tr;
  std::string trace_path;
  std::string column = "0";
  std::size_t max_rows = kDefaultTraceRows;
  std::optional<double> quantile;
  std::optional<double> drop_frac;
  std::string dump;
  auto* trace = app.add_subcommand("trace", "simulation driven by a normalized trace column");
  add_sim_options(trace, tr, true);
  trace->add_option("--trace", trace_path, "headered delimited file");
  trace->add_option("--column", column, "column name or 0-based index");
  trace->add_option("--max-rows", max_rows, "rows read at most");
  trace->add_option("--quantile", quantile, "normalization quantile");
  trace->add_option("--drop-frac", drop_frac, "fraction dropped from the top (1 - quantile)");
  trace->add_option("--dump", dump, "write normalized values, one per line");

  std::string dom_config;
  std::string dom_dist = "uniform";
  double dom_lambda = 1.0;
  std::vector<int> dom_k;
  std::string dom_set = "full";
  bool dom_lp = false;
  bool dom_csv = false;
  double dom_eps = kDefaultEpsilon;
  std::size_t dom_cap = 100'000;
  auto* dominance = app.add_subcommand("dominance", "dominance check; exits 0 iff delta > 0");
  dominance->add_option("--config", dom_config, "key = value file");
  dominance->add_option("--dist", dom_dist, "requirement law");
  dominance->add_option("--lambda", dom_lambda, "arrival rate");
  dominance->add_option("--K", dom_k, "K, or one value per resource")->delimiter(',');
  dominance->add_option("--set", dom_set, "full, 2j, 2b or xp");
  dominance->add_flag("--lp", dom_lp, "solve the max-delta LP instead of the explicit construction");
  dominance->add_flag("--csv", dom_csv, "machine-readable report");
  dominance->add_option("--epsilon", dom_eps, "construction slack");
  dominance->add_option("--cap", dom_cap, "largest candidate set for the LP");

  std::string sel_config;
  std::string sel_dist = "uniform";
  double sel_lambda = 1.0;
  std::string sel_family = "2j";
  std::optional<double> sel_lipschitz;
  double sel_eps = kDefaultEpsilon;
  auto* select = app.add_subcommand("select-k", "recommended K for a stable efficient policy");
  select->add_option("--config", sel_config, "key = value file");
  select->add_option("--dist", sel_dist, "requirement law");
  select->add_option("--lambda", sel_lambda, "arrival rate");
  select->add_option("--family", sel_family, "2b or 2j");
  select->add_option("--lipschitz", sel_lipschitz, "Lipschitz constant of a non-uniform density (2j)");
  select->add_option("--epsilon", sel_eps, "slack in the Lipschitz form");

  std::string en_config;
  std::vector<int> en_k;
  int en_d = 1;
  std::string en_set = "full";
  std::size_t en_cap = kDefaultEnumerationCap;
  std::string en_out;
  bool en_count = false;
  auto* enumerate = app.add_subcommand("enumerate", "dump a candidate set, one option per line");
  enumerate->add_option("--config", en_config, "key = value file");
  enumerate->add_option("--K", en_k, "K, or one value per resource")->delimiter(',');
  enumerate->add_option("--d", en_d, "resources when a single K is given");
  enumerate->add_option("--set", en_set, "full, 2j, 2b or xp");
  enumerate->add_option("--cap", en_cap, "enumeration cap");
  enumerate->add_option("--out", en_out, "output path");
  enumerate->add_flag("--count", en_count, "print only the number of options");

  CLI11_PARSE(app, argc, argv);

  try {
    if (simulate->parsed()) {
      apply_config(simulate, sim.config);
      finish_sim_options(sim);
      return report_rows(run_experiment(sim.exp), sim.out);
    }
    if (trace->parsed()) {
      apply_config(trace, tr.config);
      finish_sim_options(tr);
      if (trace_path.empty()) throw ConfigError("trace: a trace file is required");
      TraceSpec spec{trace_path, column, max_rows, resolve_quantile(quantile, drop_frac)};
      const auto data = load_trace(spec);
      if (data.rejected > 0) std::cerr << "rejected " << data.rejected << " nonpositive rows\n";
      const auto norm = normalize_trace(data.values, spec.quantile);
      std::cerr << format_drop_line(norm) << "\n";
      if (!dump.empty()) {
        std::string text;
        for (double v : norm.values) text += format_double(v) + "\n";
        write_output(dump, text);
      }
      return report_rows(run_trace_experiment(tr.exp, norm.values, data.column_name), tr.out);
    }
    if (dominance->parsed()) {
      apply_config(dominance, dom_config);
      const ArrivalSpec spec(dom_lambda, parse_distribution(dom_dist));
      const Grid grid = grid_from(dom_k, spec.dist.dimension());
      const auto rates = arrival_rate_vector(spec, grid);
      const auto set = candidate_set(dom_set, grid, dom_cap);
      ServiceMix mix;
      if (dom_lp || dom_set == "full" || dom_set == "xp") {
        mix = max_dominance_lp(rates, set, dom_cap).mix;
      } else if (dom_set == "2j") {
        mix = construct_beta_2J(rates, dom_eps);
      } else {
        std::vector<double> p(rates.rates);
        for (double& x : p) x /= dom_lambda;
        mix = construct_beta_2B(p, dom_lambda, dom_eps, spec.dist.max_mean());
      }
      const auto report = check_dominance(mix, rates);
      if (dom_csv) {
        std::cout << format_report_csv(report, grid);
      } else {
        std::cout << "type\tarrival_rate\tservice_rate\n";
        for (const auto& row : report.per_type)
          std::cout << grid.type_label(row.type) << "\t" << format_double(row.arrival_rate) << "\t"
                    << format_double(row.service_rate) << "\n";
        std::cout << "options\t" << mix.pruned().options.size() << "\n";
        std::cout << "mass\t" << format_double(mix.mass()) << "\n";
      }
      std::cout << "delta\t" << format_double(report.delta) << "\n";
      return report.satisfied ? 0 : 1;
    }
    if (select->parsed()) {
      apply_config(select, sel_config);
      const auto dist = parse_distribution(sel_dist);
      int K = 0;
      if (sel_family == "2b") {
        if (dist.dimension() != 1) throw ConfigError("family: 2b needs one resource");
        K = select_K_2B(sel_lambda, dist.mean()[0]);
      } else if (sel_family == "2j") {
        bool uniform = true;
        for (int l = 0; l < dist.dimension(); ++l)
          uniform = uniform && dist.coordinate(l).kind() == DistKind::Uniform;
        if (sel_lipschitz)
          K = select_K_2J_lipschitz(sel_lambda, dist.dimension(), *sel_lipschitz, sel_eps);
        else if (uniform || dist.dimension() == 1)
          K = select_K_2J(sel_lambda, dist.dimension(), uniform);
        else
          throw ConfigError("lipschitz: a non-uniform law on several resources needs --lipschitz");
      } else {
        throw ConfigError("family: expected 2b or 2j");
      }
      std::cout << K << "\n";
      return 0;
    }
    if (enumerate->parsed()) {
      apply_config(enumerate, en_config);
      const Grid grid = grid_from(en_k, en_k.size() > 1 ? static_cast<int>(en_k.size()) : en_d);
      const auto set = candidate_set(en_set, grid, en_cap);
      write_output(en_out, en_count ? std::to_string(set.options.size()) + "\n" : format_candidates(set));
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
