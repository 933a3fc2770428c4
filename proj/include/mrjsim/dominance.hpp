#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "mrjsim/discretization.hpp"
#include "mrjsim/grid.hpp"
#include "mrjsim/requirements.hpp"

namespace mrjsim {

inline constexpr double kDefaultEpsilon = 1e-3;

// K-discretized arrival rates Lambda_K, one entry per job type.
struct RateVector {
  Grid grid;
  std::vector<double> rates;

  double total() const;
};

// Probability distribution over service options. `slack` is the idle mass.
struct ServiceMix {
  Grid grid;
  std::vector<ServiceOption> options;
  std::vector<double> weights;
  double slack = 1.0;

  double mass() const;
  // Drops zero-weight options.
  ServiceMix pruned(double tol = 0.0) const;
};

struct DominanceRow {
  std::size_t type;
  double arrival_rate;
  double service_rate;
};

struct DominanceReport {
  double delta = -1.0;
  bool satisfied = false;
  std::vector<DominanceRow> per_type;
};

RateVector arrival_rate_vector(const ArrivalSpec& spec, const Grid& grid);

// eta^S_K(i) = sum over options of beta(M) * M^(i).
std::vector<double> service_measure(const ServiceMix& mix);

DominanceReport check_dominance(const ServiceMix& mix, const RateVector& rates);

// CSV "type,arrival_rate,service_rate,ratio"; the ratio is empty for types
// without arrivals.
std::string format_report_csv(const DominanceReport& report, const Grid& grid);

// Weights of the 2-Bucket construction before the unit-mass check. Option
// k-1 of the result is M_k of efficient_set_2B. `p` holds the K = 2^L
// bucket masses, weakly decreasing up to 1e-12.
struct Beta2B {
  CandidateSet options;
  std::vector<double> weights;
  double mass = 0.0;
};
Beta2B beta_2B_raw(const std::vector<double>& p, double lambda, double epsilon);

// Validated 2-Bucket construction. Throws ConstructionInfeasible on
// increasing masses and MassOverflow when the weights exceed unit mass.
// `mean_v`, when given, lets the overflow error name the K to use.
ServiceMix construct_beta_2B(const std::vector<double>& p, double lambda, double epsilon = kDefaultEpsilon,
                             std::optional<double> mean_v = std::nullopt);

// 2-Job construction: boundary singletons get (1+eps) Lambda(i), pairs get
// (1+eps) max(Lambda(j), Lambda(K-j)); a self pair {j, j} gets half of
// (1+eps) Lambda(j). Throws MassOverflow when the weights exceed unit mass.
ServiceMix construct_beta_2J(const RateVector& rates, double epsilon = kDefaultEpsilon);

struct LpDominance {
  double delta = -1.0;
  ServiceMix mix;
};

// Largest delta such that some beta with total mass <= 1 serves every type
// with positive rate at (1+delta) times its arrival rate. delta = -1 when a
// type with arrivals is served by no candidate.
LpDominance max_dominance_lp(const RateVector& rates, const CandidateSet& candidates,
                             std::size_t cap = 100'000);

// Smallest K = 2^L with L = floor(-log2(1/lambda - E V)) + 1, clamped at L = 0.
// Throws NoStableK when lambda * E V >= 1.
int select_K_2B(double lambda, double mean_v);

// Smallest odd K >= floor(lambda/(2-lambda)) + 1 for d = 1, or
// floor(2 lambda d/(2-lambda)) + 1 for uniform requirements on (0,1]^d.
// Throws NoStableK when lambda >= 2; a non-uniform law with d >= 2 needs
// select_K_2J_lipschitz.
int select_K_2J(double lambda, int d, bool uniform);

// Smallest odd K with K >= (1/((1+eps) lambda) - 1/2)^-1 (L(C,d) d + C sqrt(d)/2)
// for a centrally symmetric density with Lipschitz constant C.
int select_K_2J_lipschitz(double lambda, int d, double lipschitz, double epsilon = kDefaultEpsilon);

// Known stability boundary lambda* of a requirement law, when one applies:
// 2 for laws symmetric about 1/2, 1/E V for weakly decreasing densities,
// floor(1/v) for a point mass at v.
std::optional<double> known_stability_boundary(const RequirementDist& dist);

// rho = lambda / lambda*. Throws std::invalid_argument when lambda* is
// neither supplied nor known for the family.
double stability_load(const ArrivalSpec& spec, std::optional<double> lambda_star = std::nullopt);

// lambda * max_l E V_l, the load against the workload upper bound.
double workload_load(const ArrivalSpec& spec);

// Upper bound on the supremum of a density on [0,1]^d with Lipschitz
// constant C.
double lipschitz_sup_bound(double lipschitz, int d);
double lipschitz_threshold(int d);

}  // namespace mrjsim
