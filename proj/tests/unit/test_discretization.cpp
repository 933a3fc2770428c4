#include <algorithm>
#include <set>
#include <vector>

#include "doctest.h"
#include "mrjsim/discretization.hpp"
#include "mrjsim/error.hpp"
#include "mrjsim/grid.hpp"
#include "oracles.hpp"

using namespace mrjsim;

namespace {

ServiceOption opt(std::initializer_list<int> types) { return ServiceOption::from_types(types); }

std::set<ServiceOption> as_set(const std::vector<ServiceOption>& v) { return {v.begin(), v.end()}; }

int usage(const ServiceOption& m, const Grid& g, int l = 0) {
  int u = 0;
  for (const auto& [t, c] : m.entries()) u += g.coord(t, l) * c;
  return u;
}

}  // namespace

TEST_CASE("job types use left-open right-closed buckets") {
  CHECK(Grid({4}).job_type(std::vector<double>{0.25}) == 0);
  CHECK(Grid({4}).job_type(std::vector<double>{0.2601}) == 1);
  CHECK(Grid({4}).job_type(std::vector<double>{1.0}) == 3);
  CHECK(Grid({10}).job_type(std::vector<double>{0.3}) == 2);
  CHECK(Grid({3}).job_type(std::vector<double>{2.0 / 3.0}) == 1);
  const Grid g({8, 2});
  const auto t = g.job_type(std::vector<double>{1.0, 0.5});
  CHECK(g.coords(t) == std::vector<int>{8, 1});
  CHECK(g.type_label(t) == "(8,1)");
  CHECK_THROWS_AS(Grid({4}).job_type(std::vector<double>{0.0}), std::invalid_argument);
  CHECK_THROWS_AS(Grid({4}).job_type(std::vector<double>{1.01}), std::invalid_argument);
  CHECK_THROWS_AS(Grid({4}).job_type(std::vector<double>{-0.2}), std::invalid_argument);
  CHECK_THROWS_AS(g.job_type(std::vector<double>{0.5}), std::invalid_argument);
}

TEST_CASE("grid indexing is row-major") {
  const Grid g({3, 4});
  CHECK(g.num_types() == 12);
  for (std::size_t t = 0; t < g.num_types(); ++t) CHECK(g.index(g.coords(t)) == t);
  CHECK(g.coords(1) == std::vector<int>{1, 2});
  CHECK_THROWS(Grid({0}));
}

TEST_CASE("full enumeration") {
  SUBCASE("K = 2") {
    const auto c = enumerate_candidates(Grid({2}));
    CHECK(c.provenance == Provenance::Full);
    CHECK(as_set(c.options) == std::set<ServiceOption>{ServiceOption{}, opt({1}), opt({1, 1}), opt({2})});
    CHECK(c.options.size() == 4);
    CHECK(c.options.front().empty());
    CHECK(std::is_sorted(c.options.begin(), c.options.end()));
  }
  SUBCASE("K = 3 and K = (1,1)") {
    CHECK(enumerate_candidates(Grid({3})).options.size() == 7);
    const auto c = enumerate_candidates(Grid({1, 1}));
    CHECK(c.options.size() == 2);
    CHECK(c.options[0].empty());
    CHECK(c.options[1] == ServiceOption({{0, 1}}));
  }
  SUBCASE("counts match the partition oracle") {
    for (int K = 1; K <= 20; ++K) {
      const auto c = enumerate_candidates(Grid({K}));
      CHECK_MESSAGE(static_cast<std::int64_t>(c.options.size()) == oracle::count_options(K), "K=" << K);
      CHECK(as_set(c.options).size() == c.options.size());
      CHECK(std::is_sorted(c.options.begin(), c.options.end()));
      for (const auto& m : c.options) CHECK(is_feasible(m, c.grid));
    }
  }
  SUBCASE("two resources match brute force") {
    const Grid g({3, 2});
    std::size_t brute = 0;
    // Counts per type bounded by capacity; 6 types with small ranges.
    std::vector<int> m(6, 0);
    std::function<void(std::size_t)> rec = [&](std::size_t t) {
      if (t == m.size()) {
        std::vector<ServiceOption::Entry> e;
        for (std::size_t i = 0; i < m.size(); ++i) e.emplace_back(i, m[i]);
        brute += is_feasible(ServiceOption(e), g) ? 1 : 0;
        return;
      }
      for (int c = 0; c <= 3; ++c) {
        m[t] = c;
        rec(t + 1);
      }
    };
    rec(0);
    CHECK(enumerate_candidates(g).options.size() == brute);
  }
  SUBCASE("the cap is enforced") {
    CHECK_THROWS_AS(enumerate_candidates(Grid({20}), 100), EnumerationTooLarge);
    try {
      enumerate_candidates(Grid({20}), 100);
    } catch (const EnumerationTooLarge& e) {
      CHECK(e.cap() == 100);
      CHECK(std::string(e.what()).find("100") != std::string::npos);
    }
  }
}

TEST_CASE("2-Job efficient set") {
  SUBCASE("K = 5") {
    const auto s = efficient_set_2J(Grid({5}));
    CHECK(s.provenance == Provenance::TwoJob);
    CHECK(s.options == std::vector<ServiceOption>{opt({5}), opt({1, 4}), opt({2, 3})});
  }
  SUBCASE("K = 4 adds the self pair") {
    const auto s = efficient_set_2J(Grid({4}));
    CHECK(s.options == std::vector<ServiceOption>{opt({4}), opt({1, 3}), opt({2, 2})});
  }
  SUBCASE("K = (3,3)") {
    const Grid g({3, 3});
    const auto s = efficient_set_2J(g);
    auto ty = [&](int a, int b) { return g.index(std::vector<int>{a, b}); };
    const std::set<ServiceOption> expected{
        ServiceOption({{ty(3, 1), 1}}), ServiceOption({{ty(3, 2), 1}}), ServiceOption({{ty(3, 3), 1}}),
        ServiceOption({{ty(1, 3), 1}}), ServiceOption({{ty(2, 3), 1}}),
        ServiceOption({{ty(2, 1), 1}, {ty(1, 2), 1}}), ServiceOption({{ty(2, 2), 1}, {ty(1, 1), 1}})};
    CHECK(as_set(s.options) == expected);
    CHECK(s.options.size() == 7);
  }
  SUBCASE("odd K has (K+1)/2 options and covers every type once") {
    for (int K = 1; K <= 41; K += 2) {
      const Grid g({K});
      const auto s = efficient_set_2J(g);
      CHECK(s.options.size() == static_cast<std::size_t>((K + 1) / 2));
      std::vector<int> seen(static_cast<std::size_t>(K), 0);
      for (const auto& m : s.options) {
        CHECK(is_feasible(m, g));
        for (const auto& [t, c] : m.entries()) seen[t] += 1;
      }
      for (int x : seen) CHECK(x == 1);
    }
  }
  SUBCASE("every type of a multi-resource grid is covered") {
    for (const auto& k : std::vector<std::vector<int>>{{3, 3}, {4, 4}, {5, 3}, {2, 2, 2}, {4, 3}}) {
      const Grid g(k);
      std::vector<int> seen(g.num_types(), 0);
      for (const auto& m : efficient_set_2J(g).options) {
        CHECK(is_feasible(m, g));
        for (const auto& [t, c] : m.entries()) seen[t] += 1;
      }
      for (int x : seen) CHECK(x == 1);
    }
  }
}

TEST_CASE("2-Bucket efficient set") {
  const Grid g4({4});
  CHECK(efficient_set_2B(g4).options ==
        std::vector<ServiceOption>{ServiceOption({{0, 4}}), ServiceOption({{1, 2}}), ServiceOption({{2, 1}, {0, 1}}),
                                   ServiceOption({{3, 1}})});
  CHECK(efficient_set_2B(Grid({8})).options[2] == ServiceOption({{2, 2}, {0, 2}}));
  CHECK(efficient_set_2B(Grid({2})).options == std::vector<ServiceOption>{ServiceOption({{0, 2}}), ServiceOption({{1, 1}})});
  for (int K = 1; K <= 128; K *= 2) {
    const Grid g({K});
    const auto s = efficient_set_2B(g);
    CHECK(s.options.size() == static_cast<std::size_t>(K));
    for (const auto& m : s.options) {
      CHECK(is_feasible(m, g));
      CHECK(usage(m, g) == K);
    }
  }
  CHECK_THROWS_AS(efficient_set_2B(Grid({6})), std::invalid_argument);
  CHECK_THROWS_AS(efficient_set_2B(Grid({4, 4})), std::invalid_argument);
}

TEST_CASE("pairwise-extreme efficient set") {
  CHECK(as_set(efficient_set_XP(Grid({4})).options) ==
        std::set<ServiceOption>{opt({4}), opt({3, 1}), opt({2, 2}), opt({1, 1, 1, 1})});
  CHECK(as_set(efficient_set_XP(Grid({2})).options) == std::set<ServiceOption>{opt({2}), opt({1, 1})});
  for (int K = 2; K <= 16; K += 2) {
    const Grid g({K});
    const auto s = efficient_set_XP(g);
    CHECK(std::find(s.options.begin(), s.options.end(), ServiceOption({{static_cast<std::size_t>(K - 1), 1}})) !=
          s.options.end());
    for (const auto& m : s.options) {
      CHECK(is_feasible(m, g));
      CHECK(usage(m, g) == K);
    }
  }
  CHECK(efficient_set_XP(Grid({30})).options.size() == 980);
  CHECK(exact_usage_options(30, 30).size() == 5604);
  CHECK_THROWS_AS(efficient_set_XP(Grid({5})), std::invalid_argument);
  CHECK_THROWS_AS(efficient_set_XP(Grid({4, 4})), std::invalid_argument);
}

TEST_CASE("exact usage options") {
  for (int K = 1; K <= 15; ++K)
    for (int n = 0; n <= K; ++n) {
      const auto v = exact_usage_options(K, n);
      CHECK(static_cast<std::int64_t>(v.size()) == oracle::partitions(n, K));
      for (const auto& m : v) CHECK(usage(m, Grid({K})) == n);
    }
}

TEST_CASE("feasibility") {
  CHECK(is_feasible(opt({3, 1}), Grid({4})));
  CHECK_FALSE(is_feasible(opt({3, 2}), Grid({4})));
  const Grid g({3, 3});
  CHECK(is_feasible(ServiceOption({{g.index(std::vector<int>{2, 1}), 1}, {g.index(std::vector<int>{1, 2}), 1}}), g));
  CHECK_FALSE(is_feasible(ServiceOption({{g.index(std::vector<int>{2, 2}), 2}}), g));
  CHECK(is_feasible(ServiceOption{}, Grid({1})));
}

TEST_CASE("service options") {
  const ServiceOption m({{2, 1}, {0, 2}, {2, 1}, {1, 0}});
  CHECK(m.entries().size() == 2);
  CHECK(m.count(2) == 2);
  CHECK(m.count(1) == 0);
  CHECK(m.total_jobs() == 4);
  const std::vector<std::int64_t> q{1, 5, 3};
  CHECK(m.weight(q) == 8);
  CHECK(opt({1}) + opt({2}) == opt({1, 2}));
  CHECK(ServiceOption{} < opt({2}));
  CHECK(opt({2}) < opt({1}));
  CHECK_THROWS_AS(ServiceOption({{0, -1}}), std::invalid_argument);
}

TEST_CASE("text format round-trips") {
  for (const auto& k : std::vector<std::vector<int>>{{4}, {6}, {3, 3}, {2, 2, 2}}) {
    const Grid g(k);
    const auto set = enumerate_candidates(g);
    const auto text = format_candidates(set);
    CHECK(parse_candidates(text, g) == set.options);
  }
  CHECK(format_option(ServiceOption{}, Grid({3})) == "{}");
  CHECK(format_option(opt({3, 1, 1}), Grid({5})) == "1:2 3:1");
  CHECK(parse_option("3:1 1:2", Grid({5})) == opt({1, 1, 3}));
  CHECK(format_candidates(efficient_set_XP(Grid({2}))) == "2:1\n1:2\n");
  CHECK_THROWS(parse_option("x:1", Grid({4})));
}

TEST_CASE("boundary types") {
  const Grid g({3, 3});
  CHECK(boundary_types(g).size() == 5);
  CHECK(boundary_types(Grid({7})) == std::vector<std::size_t>{6});
  CHECK(provenance_name(Provenance::PairwiseExtreme) == "xp");
}
