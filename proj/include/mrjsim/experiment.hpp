#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "mrjsim/engine.hpp"
#include "mrjsim/requirements.hpp"

namespace mrjsim {

// "uniform", "truncnormal(0.5,1)", "lomax(2,1)", "triangular",
// "symtri(0.25,0.5)", "pointmass(0.25)", or a product of these joined with
// '*'. Parameters are optional where a default exists. Throws ConfigError.
RequirementDist parse_distribution(std::string_view spec);

// Splits at commas outside parentheses and trims each item.
std::vector<std::string> split_list(std::string_view text);

// Flat "key = value" lines; '#' starts a comment. Throws ConfigError.
std::map<std::string, std::string> parse_key_values(std::string_view text);
std::map<std::string, std::string> load_key_values(const std::string& path);

struct PolicyEntry {
  std::string name;
  int K = 0;

  std::string label() const;
};

// "name" or "name:K"; `default_k` applies to the first form.
PolicyEntry parse_policy_entry(std::string_view text, int default_k = 0);

struct ExperimentConfig {
  std::string distribution = "uniform";
  std::vector<double> lambdas;
  std::vector<double> rhos;
  std::optional<double> lambda_star;
  std::vector<std::string> policies;
  int K = 0;
  std::size_t jobs = kDefaultJobs;
  std::uint64_t seed = 1;
  unsigned workers = 1;
  double theta = kDefaultSwitchRate;
  double epsilon = kDefaultEpsilon;
  double queue_cutoff = kDefaultQueueCutoff;
  double mrt_cutoff = kDefaultMrtCutoff;
};

struct ResultRow {
  std::string policy;
  std::string distribution;
  double lambda = 0.0;
  std::optional<double> rho;
  int K = 0;
  std::uint64_t seed = 0;
  std::size_t n_jobs = 0;
  std::optional<double> mean_response_time;
  std::size_t max_queue_len = 0;
  bool unstable = false;
  std::string error;
};

// Checks the policy list, K values and load grid. Throws ConfigError
// naming the offending field.
std::vector<PolicyEntry> validate_experiment(const ExperimentConfig& config, const RequirementDist& dist);

// One run per (policy, load), policies outermost; the load at index i runs
// with seed + i. Per-run failures become rows with unstable set and no MRT.
std::vector<ResultRow> run_experiment(const ExperimentConfig& config);

// Same over a normalized trace: requirements are consumed in trace order
// and the distribution column reads "trace:<column>".
std::vector<ResultRow> run_trace_experiment(const ExperimentConfig& config, const std::vector<double>& normalized,
                                            const std::string& column);

std::string csv_header();
std::string format_csv_row(const ResultRow& row);
std::string format_csv(const std::vector<ResultRow>& rows);

}  // namespace mrjsim
