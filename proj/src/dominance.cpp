#include "mrjsim/dominance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "mrjsim/error.hpp"
#include "mrjsim/simplex.hpp"
#include "mrjsim/text.hpp"

namespace mrjsim {

namespace {

constexpr double kDecreaseTol = 1e-12;
// Slack on floor() in the K-selection formulas so values that are integers
// in exact arithmetic do not round down.
constexpr double kFloorTol = 1e-9;

int smallest_odd_at_least(double bound) {
  auto k = static_cast<int>(std::ceil(bound - kFloorTol));
  k = std::max(k, 1);
  return k % 2 == 0 ? k + 1 : k;
}

}  // namespace

double RateVector::total() const {
  double s = 0.0;
  for (double r : rates) s += r;
  return s;
}

double ServiceMix::mass() const {
  double s = 0.0;
  for (double w : weights) s += w;
  return s;
}

ServiceMix ServiceMix::pruned(double tol) const {
  ServiceMix out{grid, {}, {}, slack};
  for (std::size_t i = 0; i < options.size(); ++i)
    if (weights[i] > tol) {
      out.options.push_back(options[i]);
      out.weights.push_back(weights[i]);
    }
  out.slack = 1.0 - out.mass();
  return out;
}

RateVector arrival_rate_vector(const ArrivalSpec& spec, const Grid& grid) {
  RateVector out{grid, bucket_probabilities(spec.dist, grid)};
  for (double& r : out.rates) r *= spec.lambda;
  return out;
}

std::vector<double> service_measure(const ServiceMix& mix) {
  if (mix.weights.size() != mix.options.size()) throw std::invalid_argument("mix weights and options differ in length");
  std::vector<double> eta(mix.grid.num_types(), 0.0);
  for (std::size_t o = 0; o < mix.options.size(); ++o)
    for (const auto& [type, count] : mix.options[o].entries()) {
      if (type >= eta.size()) throw std::invalid_argument("service option refers to a type outside the grid");
      eta[type] += mix.weights[o] * count;
    }
  return eta;
}

DominanceReport check_dominance(const ServiceMix& mix, const RateVector& rates) {
  if (!(mix.grid == rates.grid)) throw std::invalid_argument("mix and rate vector use different grids");
  const auto eta = service_measure(mix);
  DominanceReport report;
  report.delta = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < rates.rates.size(); ++i) {
    report.per_type.push_back({i, rates.rates[i], eta[i]});
    if (rates.rates[i] > 0.0) report.delta = std::min(report.delta, eta[i] / rates.rates[i] - 1.0);
  }
  report.satisfied = report.delta > 0.0;
  return report;
}

std::string format_report_csv(const DominanceReport& report, const Grid& grid) {
  std::string out = "type,arrival_rate,service_rate,ratio\n";
  for (const auto& row : report.per_type) {
    std::string label = grid.type_label(row.type);
    if (grid.dimension() > 1) label = "\"" + label + "\"";
    out += label + "," + format_double(row.arrival_rate) + "," + format_double(row.service_rate) + ",";
    if (row.arrival_rate > 0.0) out += format_double(row.service_rate / row.arrival_rate);
    out += '\n';
  }
  return out;
}

Beta2B beta_2B_raw(const std::vector<double>& p, double lambda, double epsilon) {
  const int K = static_cast<int>(p.size());
  if (!is_power_of_two(K)) throw std::invalid_argument("the 2-Bucket construction needs K = 2^L masses");
  for (int k = 1; k < K; ++k)
    if (p[static_cast<std::size_t>(k)] > p[static_cast<std::size_t>(k - 1)] + kDecreaseTol)
      throw ConstructionInfeasible("bucket masses increase at type " + std::to_string(k + 1) +
                                   "; the 2-Bucket construction needs weakly decreasing masses");
  int L = 0;
  while ((1 << L) < K) ++L;

  // proxy[k] is the uncovered mass of type k when its own option M_k is
  // assigned; cur holds the round-r sequence, both 1-based.
  std::vector<double> proxy(static_cast<std::size_t>(K) + 1, 0.0);
  std::vector<double> cur(static_cast<std::size_t>(K) + 1, 0.0);
  std::copy(p.begin(), p.end(), cur.begin() + 1);
  for (int k = K / 2 + 1; k <= K; ++k) proxy[static_cast<std::size_t>(k)] = cur[static_cast<std::size_t>(k)];
  for (int r = 1; r <= L; ++r) {
    const int s = 1 << (L - r);
    std::vector<double> next(static_cast<std::size_t>(s) + 1, 0.0);
    for (int j = 1; j < s; ++j) {
      double v = cur[static_cast<std::size_t>(j)] - cur[static_cast<std::size_t>(2 * s - j)];
      if (v < -kDecreaseTol)
        throw ConstructionInfeasible("negative uncovered mass for type " + std::to_string(j) + " in round " +
                                     std::to_string(r));
      next[static_cast<std::size_t>(j)] = std::max(v, 0.0);
    }
    next[static_cast<std::size_t>(s)] = cur[static_cast<std::size_t>(s)];
    for (int k = s / 2 + 1; k <= s; ++k) proxy[static_cast<std::size_t>(k)] = next[static_cast<std::size_t>(k)];
    cur = std::move(next);
  }

  Beta2B out{efficient_set_2B(Grid({K})), {}, 0.0};
  for (int k = 1; k <= K; ++k) {
    int ell = 0;
    while ((1 << ell) < k) ++ell;
    const double w = (1.0 + epsilon) * lambda * proxy[static_cast<std::size_t>(k)] / static_cast<double>(1 << (L - ell));
    out.weights.push_back(w);
    out.mass += w;
  }
  return out;
}

ServiceMix construct_beta_2B(const std::vector<double>& p, double lambda, double epsilon, std::optional<double> mean_v) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  auto raw = beta_2B_raw(p, lambda, epsilon);
  if (raw.mass > 1.0) {
    int required = 0;
    if (mean_v) {
      try {
        required = select_K_2B(lambda, *mean_v);
      } catch (const NoStableK&) {
      }
    }
    throw MassOverflow(raw.mass, required);
  }
  ServiceMix mix{raw.options.grid, std::move(raw.options.options), std::move(raw.weights), 0.0};
  mix.slack = 1.0 - mix.mass();
  return mix;
}

ServiceMix construct_beta_2J(const RateVector& rates, double epsilon) {
  if (!(epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (rates.rates.size() != rates.grid.num_types()) throw std::invalid_argument("rate vector does not match its grid");
  auto set = efficient_set_2J(rates.grid);
  ServiceMix mix{rates.grid, std::move(set.options), {}, 0.0};
  // Each type appears in exactly one 2-Job option, so covering the largest
  // per-slot rate of the option covers all of its types.
  for (const auto& option : mix.options) {
    double need = 0.0;
    for (const auto& [type, count] : option.entries()) need = std::max(need, rates.rates[type] / count);
    mix.weights.push_back((1.0 + epsilon) * need);
  }
  const double mass = mix.mass();
  if (mass > 1.0) {
    int required = 0;
    try {
      required = select_K_2J(rates.total(), rates.grid.dimension(), true);
    } catch (const NoStableK&) {
    }
    throw MassOverflow(mass, required);
  }
  mix.slack = 1.0 - mass;
  return mix;
}

LpDominance max_dominance_lp(const RateVector& rates, const CandidateSet& candidates, std::size_t cap) {
  if (!(rates.grid == candidates.grid)) throw std::invalid_argument("rates and candidates use different grids");
  if (candidates.options.size() > cap) throw EnumerationTooLarge(cap);
  std::vector<std::size_t> row_of(rates.rates.size(), SIZE_MAX);
  std::vector<std::size_t> positive;
  for (std::size_t i = 0; i < rates.rates.size(); ++i)
    if (rates.rates[i] > 0.0) {
      row_of[i] = positive.size();
      positive.push_back(i);
    }
  if (positive.empty()) throw std::invalid_argument("no job type has a positive arrival rate");

  // Variables: beta for each candidate, then t = 1 + delta.
  const std::size_t n = candidates.options.size();
  std::vector<std::vector<double>> a(positive.size() + 1, std::vector<double>(n + 1, 0.0));
  std::vector<double> b(positive.size() + 1, 0.0);
  for (std::size_t r = 0; r < positive.size(); ++r) a[r][n] = rates.rates[positive[r]];
  for (std::size_t o = 0; o < n; ++o) {
    for (const auto& [type, count] : candidates.options[o].entries())
      if (type < row_of.size() && row_of[type] != SIZE_MAX) a[row_of[type]][o] -= count;
    a.back()[o] = 1.0;
  }
  b.back() = 1.0;
  std::vector<double> c(n + 1, 0.0);
  c[n] = 1.0;

  const auto res = lp::maximize(c, a, b);
  if (res.status != lp::Status::Optimal) throw Error("dominance LP did not reach an optimum");
  LpDominance out;
  out.delta = res.x[n] - 1.0;
  out.mix = ServiceMix{rates.grid, candidates.options, std::vector<double>(res.x.begin(), res.x.begin() + static_cast<std::ptrdiff_t>(n)), 0.0};
  out.mix.slack = 1.0 - out.mix.mass();
  return out;
}

int select_K_2B(double lambda, double mean_v) {
  if (!(lambda > 0.0) || !(mean_v > 0.0)) throw std::invalid_argument("lambda and E V must be positive");
  if (lambda * mean_v >= 1.0) throw NoStableK("lambda * E V >= 1: no stable K exists");
  const double x = -std::log2(1.0 / lambda - mean_v);
  const int L = std::max(0, static_cast<int>(std::floor(x + kFloorTol)) + 1);
  if (L > 30) throw NoStableK("lambda * E V is too close to 1 for a representable K");
  return 1 << L;
}

int select_K_2J(double lambda, int d, bool uniform) {
  if (!(lambda > 0.0) || d < 1) throw std::invalid_argument("lambda must be positive and d >= 1");
  if (lambda >= 2.0) throw NoStableK("lambda >= 2: no stable K exists");
  if (!uniform && d > 1) throw std::invalid_argument("non-uniform requirements need the Lipschitz form of the K selection");
  const double bound = d == 1 ? std::floor(lambda / (2.0 - lambda) + kFloorTol) + 1.0
                              : std::floor(2.0 * lambda * d / (2.0 - lambda) + kFloorTol) + 1.0;
  if (bound > 1e9) throw NoStableK("lambda is too close to 2 for a representable K");
  return smallest_odd_at_least(bound);
}

int select_K_2J_lipschitz(double lambda, int d, double lipschitz, double epsilon) {
  if (!(lambda > 0.0) || d < 1 || lipschitz < 0.0) throw std::invalid_argument("invalid K-selection arguments");
  const double room = 1.0 / ((1.0 + epsilon) * lambda) - 0.5;
  if (room <= 0.0) throw NoStableK("(1+eps) lambda >= 2: no stable K exists");
  const double bound = (lipschitz_sup_bound(lipschitz, d) * d + lipschitz * std::sqrt(static_cast<double>(d)) / 2.0) / room;
  if (bound > 1e9) throw NoStableK("lambda is too close to 2 for a representable K");
  return smallest_odd_at_least(bound);
}

std::optional<double> known_stability_boundary(const RequirementDist& dist) {
  bool symmetric = true;
  for (int l = 0; l < dist.dimension(); ++l) symmetric = symmetric && dist.coordinate(l).symmetric_about_half();
  if (symmetric) return 2.0;
  if (dist.dimension() != 1) return std::nullopt;
  const auto& c = dist.coordinate(0);
  if (c.kind() == DistKind::PointMass) return std::floor(1.0 / c.point_value() + kFloorTol);
  if (c.weakly_decreasing_density()) return 1.0 / c.mean();
  return std::nullopt;
}

double stability_load(const ArrivalSpec& spec, std::optional<double> lambda_star) {
  if (!lambda_star) lambda_star = known_stability_boundary(spec.dist);
  if (!lambda_star)
    throw std::invalid_argument("the stability boundary of " + spec.dist.name() + " is unknown; supply lambda*");
  if (!(*lambda_star > 0.0)) throw std::invalid_argument("lambda* must be positive");
  return spec.lambda / *lambda_star;
}

double workload_load(const ArrivalSpec& spec) { return spec.lambda * spec.dist.max_mean(); }

double lipschitz_threshold(int d) {
  if (d < 1) throw std::invalid_argument("d must be at least 1");
  // Unit-ball volume by V_d = V_{d-2} 2 pi / d, exact at d = 1.
  double volume = d % 2 == 0 ? 1.0 : 2.0;
  for (int k = d % 2 == 0 ? 2 : 3; k <= d; k += 2) volume *= 2.0 * std::numbers::pi / k;
  return (d + 1) * volume / std::ldexp(1.0, d);
}

double lipschitz_sup_bound(double lipschitz, int d) {
  if (lipschitz < 0.0) throw std::invalid_argument("Lipschitz constant must be nonnegative");
  const double c_star = lipschitz_threshold(d);
  const double c = std::max(lipschitz, c_star);
  return std::pow(c_star * std::pow(c, d), 1.0 / (d + 1));
}

}  // namespace mrjsim
