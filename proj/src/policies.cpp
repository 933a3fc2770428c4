#include "mrjsim/policies.hpp"

#include <algorithm>
#include <stdexcept>

#include "mrjsim/error.hpp"

namespace mrjsim {

SystemState::SystemState(std::size_t num_types, int dimension)
    : by_type_(num_types), q_(num_types, 0), dim_(dimension) {
  if (num_types == 0) throw std::invalid_argument("a system state needs at least one job type");
  if (dimension < 1 || dimension > kMaxResources) throw std::invalid_argument("unsupported resource dimension");
}

namespace {

// Position of `slot` in a slot list sorted by job id.
template <class Jobs>
std::vector<int>::iterator find_by_id(std::vector<int>& list, const Jobs& jobs, int slot) {
  const std::uint64_t id = jobs[static_cast<std::size_t>(slot)].id;
  return std::lower_bound(list.begin(), list.end(), id,
                          [&](int s, std::uint64_t v) { return jobs[static_cast<std::size_t>(s)].id < v; });
}

}  // namespace

int SystemState::add(std::uint64_t id, double arrival, const Requirement& req, std::size_t type) {
  if (type >= by_type_.size()) throw std::invalid_argument("job type outside the state's grid");
  if (req.dim != dim_) throw std::invalid_argument("requirement dimension does not match the state");
  if (!order_.empty() && jobs_[static_cast<std::size_t>(order_.back())].id >= id)
    throw std::invalid_argument("job ids must increase");
  int slot;
  if (!free_.empty()) {
    slot = free_.back();
    free_.pop_back();
  } else {
    slot = static_cast<int>(jobs_.size());
    jobs_.emplace_back();
    service_pos_.push_back(-1);
  }
  jobs_[static_cast<std::size_t>(slot)] = Job{id, arrival, req, type, false};
  order_.push_back(slot);
  by_type_[type].push_back(slot);
  const SizeEntry e{req.max_coordinate(), id, slot};
  by_size_.insert(std::lower_bound(by_size_.begin(), by_size_.end(), e), e);
  ++q_[type];
  return slot;
}

void SystemState::remove(int slot) {
  auto& job = jobs_[static_cast<std::size_t>(slot)];
  if (job.in_service) stop(slot);
  order_.erase(find_by_id(order_, jobs_, slot));
  auto& list = by_type_[job.type];
  list.erase(find_by_id(list, jobs_, slot));
  const SizeEntry e{job.req.max_coordinate(), job.id, slot};
  by_size_.erase(std::lower_bound(by_size_.begin(), by_size_.end(), e));
  --q_[job.type];
  free_.push_back(slot);
}

void SystemState::start(int slot) {
  auto& job = jobs_[static_cast<std::size_t>(slot)];
  if (job.in_service) return;
  job.in_service = true;
  service_pos_[static_cast<std::size_t>(slot)] = static_cast<int>(in_service_.size());
  in_service_.push_back(slot);
}

void SystemState::stop(int slot) {
  auto& job = jobs_[static_cast<std::size_t>(slot)];
  if (!job.in_service) return;
  job.in_service = false;
  const int pos = service_pos_[static_cast<std::size_t>(slot)];
  const int last = in_service_.back();
  in_service_[static_cast<std::size_t>(pos)] = last;
  service_pos_[static_cast<std::size_t>(last)] = pos;
  in_service_.pop_back();
  service_pos_[static_cast<std::size_t>(slot)] = -1;
}

void SystemState::clear_service() {
  for (int s : in_service_) {
    jobs_[static_cast<std::size_t>(s)].in_service = false;
    service_pos_[static_cast<std::size_t>(s)] = -1;
  }
  in_service_.clear();
}

Requirement SystemState::usage() const {
  Requirement used;
  used.dim = dim_;
  for (int s : in_service_)
    for (int l = 0; l < dim_; ++l) used[l] += job(s).req[l];
  return used;
}

bool fits(const Requirement& used, const Requirement& req) {
  for (int l = 0; l < req.dim; ++l)
    if (used[l] + req[l] > 1.0 + kCapacityTol) return false;
  return true;
}

namespace {

void add_usage(Requirement& used, const Requirement& req) {
  for (int l = 0; l < req.dim; ++l) used[l] += req[l];
}

Requirement zero_usage(int dim) {
  Requirement r;
  r.dim = dim;
  return r;
}

// Nothing more fits in one dimension once the free capacity is below the
// smallest job.
bool exhausted(const SystemState& state, const Requirement& used) {
  return state.dimension() == 1 && !state.empty() && used[0] + state.by_size().front().size > 1.0 + kCapacityTol;
}

class Marks {
 public:
  explicit Marks(const SystemState& state) {
    int top = 0;
    for (int s : state.arrival_order()) top = std::max(top, s);
    flags_.assign(static_cast<std::size_t>(top) + 1, 0);
  }
  bool operator[](int slot) const { return flags_[static_cast<std::size_t>(slot)] != 0; }
  void set(int slot) { flags_[static_cast<std::size_t>(slot)] = 1; }

 private:
  std::vector<char> flags_;
};

}  // namespace

ServiceOption maxweight_select(std::span<const std::int64_t> q, const CandidateSet& candidates) {
  const ServiceOption* best = nullptr;
  std::int64_t best_value = 0;
  int best_jobs = 0;
  for (const auto& option : candidates.options) {
    std::int64_t value = 0;
    for (const auto& [type, count] : option.entries())
      if (type < q.size()) value += q[type] * count;
    if (value <= 0) continue;
    const int jobs = option.total_jobs();
    if (best == nullptr || value > best_value || (value == best_value && jobs > best_jobs) ||
        (value == best_value && jobs == best_jobs && option < *best)) {
      best = &option;
      best_value = value;
      best_jobs = jobs;
    }
  }
  return best == nullptr ? ServiceOption{} : *best;
}

Schedule realize(const ServiceOption& option, const SystemState& state) {
  Schedule s;
  s.option = option;
  for (const auto& [type, count] : option.entries()) {
    if (type >= state.num_types()) continue;
    const auto list = state.of_type(type);
    const auto n = std::min(list.size(), static_cast<std::size_t>(count));
    s.served.insert(s.served.end(), list.begin(), list.begin() + static_cast<std::ptrdiff_t>(n));
  }
  return s;
}

Schedule backfill(const SystemState& state, Schedule base) {
  if (state.empty()) return base;
  Marks chosen(state);
  Requirement used = zero_usage(state.dimension());
  for (int s : base.served) {
    chosen.set(s);
    add_usage(used, state.job(s).req);
  }
  for (int s : state.arrival_order()) {
    if (exhausted(state, used)) break;
    if (chosen[s]) continue;
    const auto& req = state.job(s).req;
    if (fits(used, req)) {
      add_usage(used, req);
      base.served.push_back(s);
    }
  }
  return base;
}

namespace {

Schedule best_fit_1d(const SystemState& state) {
  Schedule out;
  const auto sizes = state.by_size();
  Marks chosen(state);
  double used = 0.0;
  auto fits_now = [&](const SystemState::SizeEntry& e) { return used + e.size <= 1.0 + kCapacityTol; };
  auto hi = static_cast<std::size_t>(std::partition_point(sizes.begin(), sizes.end(), fits_now) - sizes.begin());
  while (hi > 0) {
    const double s = sizes[hi - 1].size;
    const auto lo = static_cast<std::size_t>(
        std::lower_bound(sizes.begin(), sizes.begin() + static_cast<std::ptrdiff_t>(hi), s,
                         [](const SystemState::SizeEntry& e, double v) { return e.size < v; }) -
        sizes.begin());
    std::size_t pick = hi;
    for (std::size_t i = lo; i < hi; ++i)
      if (!chosen[sizes[i].slot]) {
        pick = i;
        break;
      }
    if (pick == hi) {
      hi = lo;
      continue;
    }
    chosen.set(sizes[pick].slot);
    out.served.push_back(sizes[pick].slot);
    used += s;
    hi = std::min(hi, static_cast<std::size_t>(
                          std::partition_point(sizes.begin(), sizes.end(), fits_now) - sizes.begin()));
  }
  return out;
}

}  // namespace

Schedule index_select(IndexKind kind, const SystemState& state) {
  Schedule out;
  Requirement used = zero_usage(state.dimension());
  auto take = [&](int s) {
    const auto& req = state.job(s).req;
    if (!fits(used, req)) return false;
    add_usage(used, req);
    out.served.push_back(s);
    return true;
  };
  switch (kind) {
    case IndexKind::FCFS:
      for (int s : state.arrival_order())
        if (!take(s)) break;
      break;
    case IndexKind::FirstFit:
      for (int s : state.arrival_order()) {
        if (exhausted(state, used)) break;
        take(s);
      }
      break;
    case IndexKind::BestFit:
      if (state.dimension() == 1) return best_fit_1d(state);
      for (auto it = state.by_size().rbegin(); it != state.by_size().rend(); ++it) take(it->slot);
      break;
    case IndexKind::LSF:
      for (const auto& e : state.by_size())
        if (!take(e.slot) && state.dimension() == 1) break;
      break;
  }
  return out;
}

Schedule pseudo_mw_select(const SystemState& state) {
  struct Group {
    double size;
    std::size_t begin;
    std::size_t end;
  };
  const auto sizes = state.by_size();
  std::vector<Group> groups;
  for (std::size_t i = 0; i < sizes.size();) {
    std::size_t j = i;
    while (j < sizes.size() && sizes[j].size == sizes[i].size) ++j;
    groups.push_back({sizes[i].size, i, j});
    i = j;
  }
  std::stable_sort(groups.begin(), groups.end(), [](const Group& a, const Group& b) {
    const double ra = a.size / static_cast<double>(a.end - a.begin);
    const double rb = b.size / static_cast<double>(b.end - b.begin);
    return ra != rb ? ra < rb : a.size < b.size;
  });
  Schedule out;
  Requirement used = zero_usage(state.dimension());
  for (const auto& g : groups) {
    if (exhausted(state, used)) break;
    for (std::size_t i = g.begin; i < g.end; ++i) {
      const auto& req = state.job(sizes[i].slot).req;
      if (!fits(used, req)) {
        if (state.dimension() == 1) break;
        continue;
      }
      add_usage(used, req);
      out.served.push_back(sizes[i].slot);
    }
  }
  return out;
}

ServiceMix nmsr_precompute(const RateVector& rates, const CandidateSet& candidates, NmsrMethod method,
                           double epsilon) {
  ServiceMix mix;
  switch (method) {
    case NmsrMethod::LP: {
      auto lp = max_dominance_lp(rates, candidates);
      if (!(lp.delta > 0.0))
        throw NotStabilizable("no service-option mix dominates the arrival rates at this K (delta* = " +
                              std::to_string(lp.delta) + ")");
      return lp.mix.pruned();
    }
    case NmsrMethod::Construction2J:
      mix = construct_beta_2J(rates, epsilon);
      break;
    case NmsrMethod::Construction2B: {
      if (rates.grid.dimension() != 1) throw std::invalid_argument("the 2-Bucket construction needs one resource");
      const double lambda = rates.total();
      std::vector<double> p(rates.rates);
      for (double& x : p) x /= lambda;
      mix = construct_beta_2B(p, lambda, epsilon);
      break;
    }
  }
  if (!(check_dominance(mix, rates).delta > 0.0))
    throw NotStabilizable("the construction does not dominate the arrival rates at this K");
  return mix.pruned();
}

ModulatingChain::ModulatingChain(const ServiceMix& mix, double theta) : theta_(theta) {
  if (!(theta > 0.0)) throw std::invalid_argument("the switch rate theta must be positive");
  double total = 0.0;
  for (std::size_t i = 0; i < mix.options.size(); ++i)
    if (mix.weights[i] > 0.0) {
      options_.push_back(mix.options[i]);
      probs_.push_back(mix.weights[i]);
      total += mix.weights[i];
    }
  if (options_.empty()) throw std::invalid_argument("the service-option mix has no support");
  double acc = 0.0;
  for (double& p : probs_) {
    p /= total;
    acc += p;
    cumulative_.push_back(acc);
  }
  cumulative_.back() = 1.0;
}

std::size_t ModulatingChain::sample(Rng& rng) const {
  const double u = uniform01(rng);
  const auto it = std::upper_bound(cumulative_.begin(), cumulative_.end(), u);
  return std::min(static_cast<std::size_t>(it - cumulative_.begin()), cumulative_.size() - 1);
}

std::size_t nmsr_step(std::size_t /*current*/, Rng& rng, const ServiceMix& mix, double theta) {
  if (!(theta > 0.0)) throw std::invalid_argument("the switch rate theta must be positive");
  double total = 0.0;
  for (double w : mix.weights) total += std::max(w, 0.0);
  if (!(total > 0.0)) throw std::invalid_argument("the service-option mix has no support");
  const double u = uniform01(rng) * total;
  double acc = 0.0;
  std::size_t last = 0;
  for (std::size_t i = 0; i < mix.weights.size(); ++i) {
    if (mix.weights[i] <= 0.0) continue;
    acc += mix.weights[i];
    last = i;
    if (u < acc) return i;
  }
  return last;
}

std::vector<int> nmsr_admit(const SystemState& state, const ServiceOption& option, const Grid& grid) {
  const int d = grid.dimension();
  std::vector<long> usage(static_cast<std::size_t>(d), 0);
  for (int s : state.in_service())
    for (int l = 0; l < d; ++l) usage[static_cast<std::size_t>(l)] += grid.coord(state.job(s).type, l);
  std::vector<int> starts;
  for (const auto& [type, count] : option.entries()) {
    if (type >= state.num_types()) continue;
    const auto list = state.of_type(type);
    int busy = 0;
    for (int s : list) busy += state.job(s).in_service ? 1 : 0;
    for (int s : list) {
      if (busy >= count) break;
      if (state.job(s).in_service) continue;
      bool room = true;
      for (int l = 0; l < d; ++l)
        room = room && usage[static_cast<std::size_t>(l)] + grid.coord(type, l) <= grid.k(l);
      if (!room) break;
      for (int l = 0; l < d; ++l) usage[static_cast<std::size_t>(l)] += grid.coord(type, l);
      starts.push_back(s);
      ++busy;
    }
  }
  return starts;
}

namespace {

void apply_preemptive(SystemState& state, const Schedule& schedule) {
  state.clear_service();
  for (int s : schedule.served) state.start(s);
}

class MaxWeightPolicy final : public Policy {
 public:
  MaxWeightPolicy(std::string name, CandidateSet candidates, bool with_backfill)
      : name_(std::move(name)), candidates_(std::move(candidates)), backfill_(with_backfill) {
    if (candidates_.options.empty()) throw std::invalid_argument("MaxWeight needs a nonempty candidate set");
  }
  std::string name() const override { return name_; }
  const Grid* grid() const override { return &candidates_.grid; }
  void schedule(SystemState& state, Rng& /*rng*/) override {
    auto s = realize(maxweight_select(state.counts(), candidates_), state);
    if (backfill_) s = backfill(state, std::move(s));
    apply_preemptive(state, s);
  }

 private:
  std::string name_;
  CandidateSet candidates_;
  bool backfill_;
};

class IndexPolicy final : public Policy {
 public:
  IndexPolicy(std::string name, IndexKind kind) : name_(std::move(name)), kind_(kind) {}
  std::string name() const override { return name_; }
  void schedule(SystemState& state, Rng& /*rng*/) override { apply_preemptive(state, index_select(kind_, state)); }

 private:
  std::string name_;
  IndexKind kind_;
};

class PseudoMwPolicy final : public Policy {
 public:
  std::string name() const override { return "pseudo-mw"; }
  void schedule(SystemState& state, Rng& /*rng*/) override { apply_preemptive(state, pseudo_mw_select(state)); }
};

class NmsrPolicy final : public Policy {
 public:
  NmsrPolicy(std::string name, Grid grid, const ServiceMix& mix, double theta, bool with_backfill)
      : name_(std::move(name)), grid_(std::move(grid)), chain_(mix, theta), backfill_(with_backfill) {}
  std::string name() const override { return name_; }
  const Grid* grid() const override { return &grid_; }
  bool preemptive() const override { return false; }
  void reset(Rng& rng) override { chain_.jump(rng); }
  double switch_rate() const override { return chain_.rate(); }
  void on_switch(Rng& rng) override { chain_.jump(rng); }
  void schedule(SystemState& state, Rng& /*rng*/) override {
    for (int s : nmsr_admit(state, chain_.current(), grid_)) state.start(s);
    if (!backfill_) return;
    Schedule base;
    base.served.assign(state.in_service().begin(), state.in_service().end());
    const auto filled = backfill(state, std::move(base));
    for (int s : filled.served) state.start(s);
  }

 private:
  std::string name_;
  Grid grid_;
  ModulatingChain chain_;
  bool backfill_;
};

struct ParsedName {
  std::string family;  // k, 2j, 2b, xp
  bool nmsr = false;
  bool backfill = false;
};

std::optional<ParsedName> parse_discretized(std::string name) {
  ParsedName p;
  if (name.size() > 2 && name.ends_with("-b")) {
    p.backfill = true;
    name.resize(name.size() - 2);
  }
  if (name == "k-mw") {
    p.family = "k";
  } else if (name == "k-nmsr") {
    p.family = "k";
    p.nmsr = true;
  } else if (name == "2j-emw" || name == "2b-emw" || name == "xp-emw") {
    p.family = name.substr(0, 2);
  } else if (name == "2j-enmsr" || name == "2b-enmsr" || name == "xp-enmsr") {
    p.family = name.substr(0, 2);
    p.nmsr = true;
  } else {
    return std::nullopt;
  }
  return p;
}

std::optional<IndexKind> parse_index(const std::string& name) {
  if (name == "fcfs") return IndexKind::FCFS;
  if (name == "first-fit") return IndexKind::FirstFit;
  if (name == "best-fit") return IndexKind::BestFit;
  if (name == "lsf") return IndexKind::LSF;
  return std::nullopt;
}

}  // namespace

bool is_known_policy(const std::string& name) {
  return parse_discretized(name).has_value() || parse_index(name).has_value() || name == "pseudo-mw";
}

bool policy_needs_k(const std::string& name) { return parse_discretized(name).has_value(); }

std::unique_ptr<Policy> make_policy(const PolicySpec& spec, const ArrivalSpec& arrival) {
  if (auto kind = parse_index(spec.name)) return std::make_unique<IndexPolicy>(spec.name, *kind);
  if (spec.name == "pseudo-mw") return std::make_unique<PseudoMwPolicy>();
  const auto parsed = parse_discretized(spec.name);
  if (!parsed) throw ConfigError("unknown policy \"" + spec.name + "\"");
  if (spec.K < 1) throw ConfigError("policy " + spec.name + " needs K >= 1");
  const int d = arrival.dist.dimension();
  if ((parsed->family == "2b" || parsed->family == "xp") && d != 1)
    throw ConfigError("policy " + spec.name + " needs one resource");
  if (parsed->family == "2b" && !is_power_of_two(spec.K)) throw ConfigError("K must be a power of two");
  if (parsed->family == "xp" && spec.K % 2 != 0) throw ConfigError("K must be even");

  const Grid grid = Grid::uniform(spec.K, d);
  CandidateSet candidates;
  if (parsed->family == "k")
    candidates = enumerate_candidates(grid, spec.enumeration_cap);
  else if (parsed->family == "2j")
    candidates = efficient_set_2J(grid);
  else if (parsed->family == "2b")
    candidates = efficient_set_2B(grid);
  else
    candidates = efficient_set_XP(grid, spec.enumeration_cap);

  if (!parsed->nmsr) return std::make_unique<MaxWeightPolicy>(spec.name, std::move(candidates), parsed->backfill);

  NmsrMethod method = NmsrMethod::LP;
  if (parsed->family == "2j") method = NmsrMethod::Construction2J;
  if (parsed->family == "2b") method = NmsrMethod::Construction2B;
  const auto mix = nmsr_precompute(arrival_rate_vector(arrival, grid), candidates, method, spec.epsilon);
  return std::make_unique<NmsrPolicy>(spec.name, grid, mix, spec.theta, parsed->backfill);
}

}  // namespace mrjsim
