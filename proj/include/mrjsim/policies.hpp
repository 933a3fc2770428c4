#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "mrjsim/discretization.hpp"
#include "mrjsim/dominance.hpp"
#include "mrjsim/grid.hpp"
#include "mrjsim/requirements.hpp"

namespace mrjsim {

inline constexpr double kCapacityTol = 1e-12;
inline constexpr double kDefaultSwitchRate = 0.1;

struct Job {
  std::uint64_t id = 0;
  double arrival = 0.0;
  Requirement req;
  std::size_t type = 0;
  bool in_service = false;
};

// Jobs in the system, addressed by stable slot numbers. Keeps the arrival
// order, a per-type arrival order, an order by size (max coordinate) and
// the per-type counts q.
class SystemState {
 public:
  struct SizeEntry {
    double size;
    std::uint64_t id;
    int slot;
    auto operator<=>(const SizeEntry&) const = default;
  };

  explicit SystemState(std::size_t num_types = 1, int dimension = 1);

  // Ids must be increasing across calls.
  int add(std::uint64_t id, double arrival, const Requirement& req, std::size_t type);
  void remove(int slot);

  const Job& job(int slot) const { return jobs_[static_cast<std::size_t>(slot)]; }
  std::size_t size() const { return order_.size(); }
  bool empty() const { return order_.empty(); }
  int dimension() const { return dim_; }
  std::size_t num_types() const { return by_type_.size(); }

  std::span<const int> arrival_order() const { return order_; }
  std::span<const int> of_type(std::size_t type) const { return by_type_[type]; }
  std::span<const SizeEntry> by_size() const { return by_size_; }
  std::span<const std::int64_t> counts() const { return q_; }
  std::span<const int> in_service() const { return in_service_; }

  void start(int slot);
  void stop(int slot);
  void clear_service();

  // Per-resource sum of true requirements of in-service jobs.
  Requirement usage() const;

 private:
  std::vector<Job> jobs_;
  std::vector<int> free_;
  std::vector<int> service_pos_;
  std::vector<int> order_;
  std::vector<std::vector<int>> by_type_;
  std::vector<SizeEntry> by_size_;
  std::vector<std::int64_t> q_;
  std::vector<int> in_service_;
  int dim_;
};

// A set of jobs selected for simultaneous service, as slots.
struct Schedule {
  std::vector<int> served;
  std::optional<ServiceOption> option;
};

// Fits with the 1e-12 capacity tolerance.
bool fits(const Requirement& used, const Requirement& req);

// argmax <M, q> over the candidates; ties go to the larger job count, then
// to the lexicographically smallest count vector. Returns the empty option
// when the best value is 0.
ServiceOption maxweight_select(std::span<const std::int64_t> q, const CandidateSet& candidates);

// Oldest min(q_i, M^(i)) jobs of each type i.
Schedule realize(const ServiceOption& option, const SystemState& state);

// Adds unserved jobs in arrival order whenever their true requirement fits
// the capacity left by the jobs already in the schedule.
Schedule backfill(const SystemState& state, Schedule base);

enum class IndexKind { FCFS, FirstFit, BestFit, LSF };

Schedule index_select(IndexKind kind, const SystemState& state);

// Groups jobs by exact size, packs groups in increasing size/count order
// (ties by smaller size) and skips jobs that do not fit.
Schedule pseudo_mw_select(const SystemState& state);

enum class NmsrMethod { LP, Construction2B, Construction2J };

// Service-option mix for nMSR. Throws NotStabilizable when the resulting
// dominance delta is not positive.
ServiceMix nmsr_precompute(const RateVector& rates, const CandidateSet& candidates, NmsrMethod method,
                           double epsilon = kDefaultEpsilon);

// Option-modulating chain: jumps at rate theta to an option drawn from the
// normalized mix, independent of the current one.
class ModulatingChain {
 public:
  ModulatingChain(const ServiceMix& mix, double theta);

  double rate() const { return theta_; }
  const ServiceOption& current() const { return options_[current_]; }
  std::size_t current_index() const { return current_; }
  std::span<const ServiceOption> support() const { return options_; }
  std::span<const double> probabilities() const { return probs_; }

  std::size_t sample(Rng& rng) const;
  void jump(Rng& rng) { current_ = sample(rng); }

 private:
  std::vector<ServiceOption> options_;
  std::vector<double> probs_;
  std::vector<double> cumulative_;
  double theta_;
  std::size_t current_ = 0;
};

// Next option after one jump of the chain.
std::size_t nmsr_step(std::size_t current, Rng& rng, const ServiceMix& mix, double theta);

// Waiting jobs to start under `option` without preempting anyone: the oldest
// waiting type-i job starts while fewer than M^(i) type-i jobs are in
// service and the rounded-up usage of all in-service jobs stays within K.
std::vector<int> nmsr_admit(const SystemState& state, const ServiceOption& option, const Grid& grid);

class Policy {
 public:
  virtual ~Policy() = default;
  virtual std::string name() const = 0;
  // Grid used to type jobs; nullptr for index policies.
  virtual const Grid* grid() const { return nullptr; }
  virtual bool preemptive() const { return true; }
  // Called once before the first event.
  virtual void reset(Rng& /*rng*/) {}
  // Updates the in-service set of `state` after a state change.
  virtual void schedule(SystemState& state, Rng& rng) = 0;
  // Rate of exogenous policy events and their handler.
  virtual double switch_rate() const { return 0.0; }
  virtual void on_switch(Rng& /*rng*/) {}
};

struct PolicySpec {
  std::string name;
  int K = 0;
  double theta = kDefaultSwitchRate;
  double epsilon = kDefaultEpsilon;
  std::size_t enumeration_cap = kDefaultEnumerationCap;
};

// Policy names: k-mw, 2j-emw, 2b-emw, xp-emw, k-nmsr, 2j-enmsr, 2b-enmsr,
// xp-enmsr (each with an optional "-b" backfill suffix), fcfs, first-fit,
// best-fit, lsf, pseudo-mw. Discretized kinds need K >= 1; nMSR kinds use
// the arrival spec to precompute their mix. Throws ConfigError for unknown
// names or invalid K.
std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const ArrivalSpec& arrival);

bool is_known_policy(const std::string& name);
bool policy_needs_k(const std::string& name);

}  // namespace mrjsim
