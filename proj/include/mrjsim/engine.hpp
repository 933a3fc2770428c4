#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "mrjsim/policies.hpp"
#include "mrjsim/requirements.hpp"

namespace mrjsim {

inline constexpr std::size_t kDefaultJobs = 1'000'000;
inline constexpr double kDefaultQueueCutoff = 1e4;
inline constexpr double kDefaultMrtCutoff = 1e3;
inline constexpr std::size_t kMrtCheckInterval = 10'000;

enum class EventKind { Arrival, Completion, Switch };

struct SimConfig {
  ArrivalSpec arrival;
  PolicySpec policy;
  std::size_t jobs = kDefaultJobs;
  std::uint64_t seed = 1;
  double queue_cutoff = kDefaultQueueCutoff;
  double mrt_cutoff = kDefaultMrtCutoff;
  // Completions of jobs with id < warmup are left out of the mean.
  std::size_t warmup = 0;
  // Requirements consumed in order instead of sampling; the run then has
  // min(jobs, requirements.size()) arrivals.
  std::shared_ptr<const std::vector<Requirement>> requirements;
  // Checks true-capacity feasibility after every event.
  bool audit = true;
  // Called after every rescheduling, with the event that caused it.
  std::function<void(const SystemState&, EventKind, double)> observer;
};

struct SimResult {
  double mean_response_time = 0.0;
  std::size_t arrivals = 0;
  std::size_t completed = 0;
  std::size_t max_queue = 0;
  std::size_t in_system = 0;
  bool unstable = false;
  std::string cutoff;  // "queue", "mrt" or "stalled" when unstable
  double end_time = 0.0;
  double wall_seconds = 0.0;
  std::uint64_t seed = 0;
};

// Queue length is the number of jobs in the system.
SimResult run_simulation(const SimConfig& config);
// Same run with a caller-built policy.
SimResult run_simulation(const SimConfig& config, Policy& policy);

struct SweepRow {
  double lambda = 0.0;
  double rho = 0.0;
  std::optional<SimResult> result;
  std::string error;
};

// One run per load with lambda = rho * lambda_star and seed base.seed + i;
// rows keep input order. Errors become per-row failures.
std::vector<SweepRow> sweep(const SimConfig& base, const std::vector<double>& loads, double lambda_star,
                            unsigned workers = 1);
// Same with arrival rates given directly; rho is lambda / lambda_star when
// lambda_star is positive and 0 otherwise.
std::vector<SweepRow> sweep_lambdas(const SimConfig& base, const std::vector<double>& lambdas, double lambda_star,
                                    unsigned workers = 1);

// Runs tasks 0..n-1 on up to `workers` threads.
void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& task);

}  // namespace mrjsim
