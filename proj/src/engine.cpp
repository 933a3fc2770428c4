#include "mrjsim/engine.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include "mrjsim/error.hpp"

namespace mrjsim {

namespace {

void validate(const SimConfig& c) {
  if (c.jobs < 1) throw std::invalid_argument("the job budget must be at least 1");
  if (!(c.queue_cutoff > 0.0) || !(c.mrt_cutoff > 0.0)) throw std::invalid_argument("cutoffs must be positive");
  if (!(c.arrival.lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (c.requirements && c.requirements->empty()) throw std::invalid_argument("the requirement sequence is empty");
}

void audit_capacity(const SystemState& state, double t) {
  const auto used = state.usage();
  for (int l = 0; l < used.dim; ++l)
    if (used[l] > 1.0 + kCapacityTol)
      throw Error("capacity exceeded on resource " + std::to_string(l + 1) + " at time " + std::to_string(t));
}

}  // namespace

SimResult run_simulation(const SimConfig& config) {
  auto policy = make_policy(config.policy, config.arrival);
  return run_simulation(config, *policy);
}

SimResult run_simulation(const SimConfig& c, Policy& policy) {
  validate(c);
  const auto wall_start = std::chrono::steady_clock::now();
  const int dim = c.requirements ? c.requirements->front().dim : c.arrival.dist.dimension();
  const Grid* grid = policy.grid();
  if (grid != nullptr && grid->dimension() != dim)
    throw std::invalid_argument("policy grid dimension does not match the requirements");
  const std::size_t budget = c.requirements ? std::min(c.jobs, c.requirements->size()) : c.jobs;

  Rng rng(c.seed);
  SystemState state(grid != nullptr ? grid->num_types() : 1, dim);
  policy.reset(rng);

  SimResult r;
  r.seed = c.seed;
  double t = 0.0;
  double rt_sum = 0.0;
  std::size_t counted = 0;
  std::size_t events = 0;
  while (true) {
    const bool open = r.arrivals < budget;
    if (!open && state.empty()) break;
    const double lam = open ? c.arrival.lambda : 0.0;
    const double mu = static_cast<double>(state.in_service().size());
    const double total = lam + mu + policy.switch_rate();
    if (!(total > 0.0)) {
      r.unstable = true;
      r.cutoff = "stalled";
      break;
    }
    t += exponential(rng, total);
    const double u = uniform01(rng) * total;
    EventKind kind;
    if (u < lam) {
      kind = EventKind::Arrival;
      const Requirement req = c.requirements ? (*c.requirements)[r.arrivals] : c.arrival.dist.sample(rng);
      const std::size_t type = grid != nullptr ? grid->job_type(req.values()) : 0;
      state.add(r.arrivals, t, req, type);
      ++r.arrivals;
    } else if (u < lam + mu) {
      kind = EventKind::Completion;
      const auto n = state.in_service().size();
      const auto pick = std::min(static_cast<std::size_t>(u - lam), n - 1);
      const int slot = state.in_service()[pick];
      const Job& job = state.job(slot);
      if (job.id >= c.warmup) {
        rt_sum += t - job.arrival;
        ++counted;
      }
      ++r.completed;
      state.remove(slot);
    } else {
      kind = EventKind::Switch;
      policy.on_switch(rng);
    }
    policy.schedule(state, rng);
    if (c.audit) audit_capacity(state, t);
    if (c.observer) c.observer(state, kind, t);
    r.max_queue = std::max(r.max_queue, state.size());
    if (kind == EventKind::Arrival && static_cast<double>(state.size()) > c.queue_cutoff) {
      r.unstable = true;
      r.cutoff = "queue";
      break;
    }
    if (++events % kMrtCheckInterval == 0 && counted > 0 && rt_sum / static_cast<double>(counted) > c.mrt_cutoff) {
      r.unstable = true;
      r.cutoff = "mrt";
      break;
    }
  }
  r.mean_response_time = counted > 0 ? rt_sum / static_cast<double>(counted) : std::numeric_limits<double>::quiet_NaN();
  r.in_system = state.size();
  r.end_time = t;
  r.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return r;
}

void parallel_for(std::size_t n, unsigned workers, const std::function<void(std::size_t)>& task) {
  workers = std::max(1u, std::min<unsigned>(workers, static_cast<unsigned>(std::max<std::size_t>(n, 1))));
  if (workers == 1) {
    for (std::size_t i = 0; i < n; ++i) task(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> pool;
  for (unsigned w = 0; w < workers; ++w)
    pool.emplace_back([&] {
      for (std::size_t i = next++; i < n; i = next++) task(i);
    });
  for (auto& th : pool) th.join();
}

std::vector<SweepRow> sweep_lambdas(const SimConfig& base, const std::vector<double>& lambdas, double lambda_star,
                                    unsigned workers) {
  std::vector<SweepRow> rows(lambdas.size());
  parallel_for(lambdas.size(), workers, [&](std::size_t i) {
    auto& row = rows[i];
    row.lambda = lambdas[i];
    row.rho = lambda_star > 0.0 ? lambdas[i] / lambda_star : 0.0;
    try {
      SimConfig c = base;
      c.arrival.lambda = lambdas[i];
      c.seed = base.seed + i;
      row.result = run_simulation(c);
    } catch (const std::exception& e) {
      row.error = e.what();
    }
  });
  return rows;
}

std::vector<SweepRow> sweep(const SimConfig& base, const std::vector<double>& loads, double lambda_star,
                            unsigned workers) {
  if (!(lambda_star > 0.0)) throw std::invalid_argument("lambda* must be positive");
  std::vector<double> lambdas;
  lambdas.reserve(loads.size());
  for (double rho : loads) lambdas.push_back(rho * lambda_star);
  auto rows = sweep_lambdas(base, lambdas, lambda_star, workers);
  for (std::size_t i = 0; i < rows.size(); ++i) rows[i].rho = loads[i];
  return rows;
}

}  // namespace mrjsim
