#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <map>
#include <utility>

namespace oracle {

inline double simpson_step(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
                           double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  if (depth <= 0 || std::abs(left + right - whole) <= 15.0 * tol) return left + right + (left + right - whole) / 15.0;
  return simpson_step(f, a, m, fa, flm, fm, left, tol / 2.0, depth - 1) +
         simpson_step(f, m, b, fm, frm, fb, right, tol / 2.0, depth - 1);
}

// Adaptive Simpson quadrature of f over [a, b].
inline double integrate_once(const std::function<double(double)>& f, double a, double b, double tol) {
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_step(f, a, b, fa, fm, fb, whole, tol, 50);
}

// Splits [a, b] into 64 panels so narrow supports are not missed.
inline double integrate(const std::function<double(double)>& f, double a, double b, double tol = 1e-12) {
  constexpr int panels = 64;
  double sum = 0.0;
  for (int i = 0; i < panels; ++i)
    sum += integrate_once(f, a + (b - a) * i / panels, a + (b - a) * (i + 1) / panels, tol / panels);
  return sum;
}

// Partitions of n into parts of size at most m.
inline std::int64_t partitions(int n, int m) {
  static std::map<std::pair<int, int>, std::int64_t> memo;
  if (n == 0) return 1;
  if (n < 0 || m == 0) return 0;
  const auto key = std::make_pair(n, m);
  if (auto it = memo.find(key); it != memo.end()) return it->second;
  const std::int64_t v = partitions(n - m, m) + partitions(n, m - 1);
  memo[key] = v;
  return v;
}

// |C_K| for one resource: multisets of sizes in 1..K with total at most K.
inline std::int64_t count_options(int K) {
  std::int64_t total = 0;
  for (int n = 0; n <= K; ++n) total += partitions(n, K);
  return total;
}

// Erlang-C mean response time of M/M/c with unit service rate.
inline double erlang_c_response(int c, double lambda) {
  double term = 1.0;
  double sum = 1.0;
  for (int k = 1; k < c; ++k) {
    term *= lambda / k;
    sum += term;
  }
  const double top = term * lambda / c * c / (c - lambda);
  const double p_wait = top / (sum + top);
  return 1.0 + p_wait / (c - lambda);
}

// Upper chi-square quantile by the Wilson-Hilferty approximation.
inline double chi2_quantile(double dof, double z) {
  const double h = 2.0 / (9.0 * dof);
  return dof * std::pow(1.0 - h + z * std::sqrt(h), 3.0);
}

}  // namespace oracle
