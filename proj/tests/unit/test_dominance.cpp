#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <vector>

#include "doctest.h"
#include "mrjsim/discretization.hpp"
#include "mrjsim/dominance.hpp"
#include "mrjsim/error.hpp"
#include "mrjsim/simplex.hpp"

using namespace mrjsim;

namespace {

// Max t over vertices of {Lambda_i t <= sum beta M^(i), sum beta <= 1, beta, t >= 0}
// restricted to types with positive rate.
double brute_force_lp(const RateVector& rates, const std::vector<ServiceOption>& options) {
  std::vector<std::size_t> active;
  for (std::size_t i = 0; i < rates.rates.size(); ++i)
    if (rates.rates[i] > 0.0) active.push_back(i);
  const int m = static_cast<int>(options.size());
  const int n = m + 1;  // beta..., t
  std::vector<Eigen::VectorXd> rows;
  std::vector<double> rhs;
  for (auto i : active) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    for (int j = 0; j < m; ++j) a[j] = -options[static_cast<std::size_t>(j)].count(i);
    a[m] = rates.rates[i];
    rows.push_back(a);
    rhs.push_back(0.0);
  }
  Eigen::VectorXd sum = Eigen::VectorXd::Zero(n);
  sum.head(m).setOnes();
  rows.push_back(sum);
  rhs.push_back(1.0);
  for (int j = 0; j < n; ++j) {
    Eigen::VectorXd a = Eigen::VectorXd::Zero(n);
    a[j] = -1.0;
    rows.push_back(a);
    rhs.push_back(0.0);
  }
  const int total = static_cast<int>(rows.size());
  double best = -std::numeric_limits<double>::infinity();
  std::vector<int> pick(static_cast<std::size_t>(n));
  std::function<void(int, int)> rec = [&](int start, int depth) {
    if (depth == n) {
      Eigen::MatrixXd A(n, n);
      Eigen::VectorXd b(n);
      for (int r = 0; r < n; ++r) {
        A.row(r) = rows[static_cast<std::size_t>(pick[static_cast<std::size_t>(r)])].transpose();
        b[r] = rhs[static_cast<std::size_t>(pick[static_cast<std::size_t>(r)])];
      }
      Eigen::FullPivLU<Eigen::MatrixXd> lu(A);
      if (lu.rank() < n) return;
      const Eigen::VectorXd x = lu.solve(b);
      for (int r = 0; r < total; ++r)
        if (rows[static_cast<std::size_t>(r)].dot(x) > rhs[static_cast<std::size_t>(r)] + 1e-9) return;
      best = std::max(best, x[m]);
      return;
    }
    for (int r = start; r < total; ++r) {
      pick[static_cast<std::size_t>(depth)] = r;
      rec(r + 1, depth + 1);
    }
  };
  rec(0, 0);
  return best - 1.0;
}

RateVector rates_of(std::vector<int> k, std::vector<double> r) { return RateVector{Grid(std::move(k)), std::move(r)}; }

}  // namespace

TEST_CASE("arrival rate vectors") {
  const auto r = arrival_rate_vector(ArrivalSpec(2.0, Dist1D::uniform()), Grid({4}));
  CHECK(r.rates.size() == 4);
  for (double x : r.rates) CHECK(x == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(r.total() == doctest::Approx(2.0).epsilon(1e-12));
  const auto pm = arrival_rate_vector(ArrivalSpec(1.5, Dist1D::point_mass(0.5)), Grid({4}));
  CHECK(pm.rates == std::vector<double>{0.0, 1.5, 0.0, 0.0});
}

TEST_CASE("service measure and dominance check") {
  ServiceMix mix{Grid({2}), {ServiceOption::from_types({1, 1}), ServiceOption::from_types({2})}, {0.25, 0.5}, 0.25};
  CHECK(mix.mass() == 0.75);
  CHECK(service_measure(mix) == std::vector<double>{0.5, 0.5});
  const auto rep = check_dominance(mix, rates_of({2}, {0.25, 0.4}));
  CHECK(rep.delta == doctest::Approx(0.25));
  CHECK(rep.satisfied);
  CHECK(rep.per_type.size() == 2);
  CHECK_FALSE(check_dominance(mix, rates_of({2}, {0.5, 0.4})).satisfied);
  const auto csv = format_report_csv(rep, Grid({2}));
  CHECK(csv.rfind("type,arrival_rate,service_rate,ratio\n", 0) == 0);
  ServiceMix z{Grid({2}), {ServiceOption::from_types({2})}, {0.0}, 1.0};
  CHECK(z.pruned().options.empty());
}

TEST_CASE("LP dominance examples") {
  SUBCASE("uniform K = 2 at lambda = 1") {
    const auto rates = arrival_rate_vector(ArrivalSpec(1.0, Dist1D::uniform()), Grid({2}));
    const auto lp = max_dominance_lp(rates, enumerate_candidates(Grid({2})));
    CHECK(lp.delta == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
    CHECK(lp.mix.mass() <= 1.0 + 1e-9);
    CHECK(check_dominance(lp.mix, rates).delta == doctest::Approx(lp.delta).epsilon(1e-9));
  }
  SUBCASE("point mass at 1 is unstable beyond lambda = 1") {
    const auto rates = arrival_rate_vector(ArrivalSpec(1.5, Dist1D::point_mass(1.0)), Grid({1}));
    CHECK(max_dominance_lp(rates, enumerate_candidates(Grid({1}))).delta == doctest::Approx(-1.0 / 3.0));
  }
  SUBCASE("point mass at 1/3 supports three jobs") {
    const auto rates = arrival_rate_vector(ArrivalSpec(2.0, Dist1D::point_mass(1.0 / 3.0)), Grid({3}));
    CHECK(max_dominance_lp(rates, enumerate_candidates(Grid({3}))).delta == doctest::Approx(0.5));
  }
  SUBCASE("unserved type gives -1") {
    const CandidateSet only_small{Grid({2}), {ServiceOption::from_types({1})}, Provenance::Explicit};
    CHECK(max_dominance_lp(rates_of({2}, {0.5, 0.5}), only_small).delta == -1.0);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(max_dominance_lp(rates_of({2}, {0.0, 0.0}), enumerate_candidates(Grid({2}))),
                    std::invalid_argument);
    CHECK_THROWS_AS(max_dominance_lp(rates_of({4}, {1, 1, 1, 1}), enumerate_candidates(Grid({4})), 3),
                    EnumerationTooLarge);
  }
}

TEST_CASE("LP matches brute-force vertex enumeration") {
  const std::vector<std::pair<std::vector<int>, ArrivalSpec>> cases{
      {{2}, ArrivalSpec(1.3, Dist1D::uniform())},
      {{3}, ArrivalSpec(1.7, Dist1D::uniform())},
      {{4}, ArrivalSpec(2.2, Dist1D::triangular_decreasing())},
      {{4}, ArrivalSpec(1.1, Dist1D::truncated_normal(0.5, 1.0))},
      {{3}, ArrivalSpec(0.8, Dist1D::bounded_lomax(2.0, 1.0))},
      {{2, 2}, ArrivalSpec(0.9, RequirementDist::product({Dist1D::uniform(), Dist1D::uniform()}))},
  };
  for (const auto& [k, spec] : cases) {
    const Grid g(k);
    const auto rates = arrival_rate_vector(spec, g);
    const auto full = enumerate_candidates(g);
    std::vector<ServiceOption> nonempty;
    for (const auto& m : full.options)
      if (!m.empty()) nonempty.push_back(m);
    CAPTURE(spec.dist.name());
    CHECK(max_dominance_lp(rates, full).delta == doctest::Approx(brute_force_lp(rates, nonempty)).epsilon(1e-7));
  }
}

TEST_CASE("LP properties") {
  const Grid g({6});
  const auto full = enumerate_candidates(g);
  const auto xp = efficient_set_XP(g);
  double prev = std::numeric_limits<double>::infinity();
  for (double lam : {0.5, 1.0, 1.5, 1.9, 2.5}) {
    const auto rates = arrival_rate_vector(ArrivalSpec(lam, Dist1D::uniform()), g);
    const double df = max_dominance_lp(rates, full).delta;
    const double dx = max_dominance_lp(rates, xp).delta;
    CHECK(df < prev);
    CHECK(dx <= df + 1e-9);
    CHECK((1.0 + df) * lam == doctest::Approx((1.0 + max_dominance_lp(arrival_rate_vector(ArrivalSpec(1.0, Dist1D::uniform()), g), full).delta)).epsilon(1e-9));
    prev = df;
  }
  const auto tri = arrival_rate_vector(ArrivalSpec(2.0, Dist1D::triangular_decreasing()), g);
  CHECK(max_dominance_lp(tri, xp).delta == doctest::Approx(max_dominance_lp(tri, full).delta).epsilon(1e-9));
}

TEST_CASE("2-Bucket construction") {
  const auto tri = Dist1D::triangular_decreasing();
  for (int K : {1, 2, 4, 8, 16, 32}) {
    const Grid g({K});
    const auto p = bucket_probabilities(tri, g);
    const double lam = 2.0;
    const double eps = 1e-3;
    const auto raw = beta_2B_raw(p, lam, eps);
    CHECK(raw.weights.size() == static_cast<std::size_t>(K));
    for (double w : raw.weights) CHECK(w >= 0.0);
    ServiceMix mix{g, raw.options.options, raw.weights, 0.0};
    const auto eta = service_measure(mix);
    for (int k = 0; k < K; ++k)
      CHECK(eta[static_cast<std::size_t>(k)] >= (1.0 + eps) * lam * p[static_cast<std::size_t>(k)] - 1e-12);
    // Full utilization bounds the mass from below by the rounded-up workload.
    double rounded = 0.0;
    for (int k = 1; k <= K; ++k) rounded += p[static_cast<std::size_t>(k - 1)] * k / K;
    CHECK(raw.mass >= (1.0 + eps) * lam * rounded - 1e-12);
  }
  SUBCASE("uniform masses give the closed form") {
    const std::vector<double> p(8, 1.0 / 8.0);
    const auto raw = beta_2B_raw(p, 1.0, 0.0);
    double sum = 0.0;
    for (double w : raw.weights) sum += w;
    CHECK(raw.mass == doctest::Approx(sum));
    const auto eta = service_measure(ServiceMix{Grid({8}), raw.options.options, raw.weights, 0.0});
    for (double e : eta) CHECK(e >= 1.0 / 8.0 - 1e-12);
  }
  SUBCASE("errors") {
    CHECK_THROWS_AS(beta_2B_raw({0.2, 0.3, 0.25, 0.25}, 1.0, 1e-3), ConstructionInfeasible);
    CHECK_THROWS_AS(beta_2B_raw({0.5, 0.3, 0.2}, 1.0, 1e-3), std::invalid_argument);
    const auto p = bucket_probabilities(tri, Grid({8}));
    try {
      construct_beta_2B(p, 2.7, 1e-3, tri.mean());
      FAIL("expected overflow");
    } catch (const MassOverflow& e) {
      CHECK(e.mass() > 1.0);
      CHECK(e.required_k() == 32);
      CHECK(std::string(e.what()).find("use K >= 32") != std::string::npos);
    }
    const auto ok = construct_beta_2B(bucket_probabilities(tri, Grid({32})), 2.7, 1e-3, tri.mean());
    CHECK(ok.mass() <= 1.0);
    CHECK(ok.slack == doctest::Approx(1.0 - ok.mass()));
  }
}

TEST_CASE("2-Job construction") {
  SUBCASE("K = 5 uniform") {
    const auto rates = arrival_rate_vector(ArrivalSpec(1.5, Dist1D::uniform()), Grid({5}));
    const auto mix = construct_beta_2J(rates, 1e-3);
    CHECK(mix.options.size() == 3);
    for (double w : mix.weights) CHECK(w == doctest::Approx(1.001 * 0.3).epsilon(1e-12));
    CHECK(check_dominance(mix, rates).delta == doctest::Approx(1e-3).epsilon(1e-9));
  }
  SUBCASE("K = 4 self pair gets half weight") {
    const auto mix = construct_beta_2J(rates_of({4}, {0.1, 0.4, 0.2, 0.3}), 0.0 + 1e-9);
    CHECK(mix.weights[0] == doctest::Approx(0.3));
    CHECK(mix.weights[1] == doctest::Approx(0.2));
    CHECK(mix.weights[2] == doctest::Approx(0.2));
  }
  SUBCASE("overflow") {
    const auto rates = arrival_rate_vector(ArrivalSpec(1.9, Dist1D::uniform()), Grid({5}));
    CHECK_THROWS_AS(construct_beta_2J(rates, 1e-3), MassOverflow);
    CHECK_NOTHROW(construct_beta_2J(arrival_rate_vector(ArrivalSpec(1.9, Dist1D::uniform()), Grid({21})), 1e-3));
  }
  SUBCASE("two resources") {
    const auto rates = arrival_rate_vector(
        ArrivalSpec(1.0, RequirementDist::product({Dist1D::uniform(), Dist1D::uniform()})), Grid({5, 5}));
    const auto mix = construct_beta_2J(rates, 1e-3);
    CHECK(check_dominance(mix, rates).delta >= 1e-3 - 1e-9);
  }
}

TEST_CASE("K selection") {
  CHECK(select_K_2B(2.7, 1.0 / 3.0) == 32);
  CHECK(select_K_2B(0.1, 0.5) == 1);
  CHECK_THROWS_AS(select_K_2B(3.0, 1.0 / 3.0), NoStableK);
  CHECK(select_K_2J(1.5, 1, true) == 5);
  CHECK(select_K_2J(1.9, 1, true) == 21);
  CHECK(select_K_2J(0.5, 1, true) == 1);
  CHECK(select_K_2J(1.0, 2, true) == 5);
  CHECK(select_K_2J(1.5, 1, false) == 5);
  CHECK_THROWS_AS(select_K_2J(2.0, 1, true), NoStableK);
  CHECK_THROWS_AS(select_K_2J(1.0, 2, false), std::invalid_argument);
  for (double lam : {0.5, 1.0, 1.5, 1.8}) {
    const int K = select_K_2J(lam, 1, true);
    CHECK(K % 2 == 1);
    const auto rates = arrival_rate_vector(ArrivalSpec(lam, Dist1D::uniform()), Grid({K}));
    CHECK(max_dominance_lp(rates, efficient_set_2J(Grid({K}))).delta > 0.0);
  }
  const int kl = select_K_2J_lipschitz(1.5, 1, 4.0);
  CHECK(kl % 2 == 1);
  CHECK(kl >= select_K_2J(1.5, 1, true));
  CHECK(select_K_2J_lipschitz(1.5, 2, 4.0) > kl);
}

TEST_CASE("stability boundaries and loads") {
  CHECK(known_stability_boundary(Dist1D::uniform()) == 2.0);
  CHECK(known_stability_boundary(Dist1D::truncated_normal(0.5, 1.0)) == 2.0);
  CHECK(known_stability_boundary(Dist1D::point_mass(0.3)) == 3.0);
  CHECK(known_stability_boundary(Dist1D::point_mass(0.25)) == 4.0);
  CHECK(*known_stability_boundary(Dist1D::triangular_decreasing()) == doctest::Approx(3.0));
  CHECK(*known_stability_boundary(Dist1D::bounded_lomax(2.0, 1.0)) == doctest::Approx(3.0));
  CHECK_FALSE(known_stability_boundary(Dist1D::truncated_normal(0.3, 0.2)).has_value());
  CHECK(stability_load(ArrivalSpec(1.5, Dist1D::uniform())) == 0.75);
  CHECK(stability_load(ArrivalSpec(1.5, Dist1D::truncated_normal(0.3, 0.2)), 3.0) == 0.5);
  CHECK_THROWS_AS(stability_load(ArrivalSpec(1.5, Dist1D::truncated_normal(0.3, 0.2))), std::invalid_argument);
  CHECK(workload_load(ArrivalSpec(1.5, Dist1D::uniform())) == 0.75);
}

TEST_CASE("Lipschitz sup bound") {
  CHECK(lipschitz_threshold(1) == 2.0);
  CHECK(lipschitz_threshold(2) == doctest::Approx(3.0 * M_PI / 4.0).epsilon(1e-14));
  CHECK(lipschitz_threshold(3) == doctest::Approx(2.0 * M_PI / 3.0).epsilon(1e-14));
  CHECK(lipschitz_sup_bound(2.0, 1) == 2.0);
  CHECK(lipschitz_sup_bound(8.0, 1) == 4.0);
  for (int d = 1; d <= 3; ++d) {
    const double cs = lipschitz_threshold(d);
    CHECK(lipschitz_sup_bound(cs, d) == doctest::Approx(cs));
    CHECK(lipschitz_sup_bound(0.0, d) == doctest::Approx(cs));
    CHECK(lipschitz_sup_bound(2 * cs, d) > lipschitz_sup_bound(cs, d));
  }
  // The symmetric triangular density on [0,1] has sup 2 and Lipschitz constant 4.
  CHECK(lipschitz_sup_bound(4.0, 1) >= 2.0);
  CHECK_THROWS_AS(lipschitz_sup_bound(-1.0, 1), std::invalid_argument);
}

TEST_CASE("simplex") {
  // max 3x + 2y  s.t. x + y <= 4, x + 3y <= 6, x <= 3.
  const auto r = lp::maximize({3, 2}, {{1, 1}, {1, 3}, {1, 0}}, {4, 6, 3});
  CHECK(r.status == lp::Status::Optimal);
  CHECK(r.objective == doctest::Approx(11.0));
  CHECK(r.x[0] == doctest::Approx(3.0));
  CHECK(r.x[1] == doctest::Approx(1.0));
  CHECK(lp::maximize({1, 1}, {{1, -1}}, {1}).status == lp::Status::Unbounded);
  const auto zero = lp::maximize({-1, -1}, {{1, 1}}, {1});
  CHECK(zero.objective == doctest::Approx(0.0));
}
