#include "mrjsim/simplex.hpp"

#include <stdexcept>

namespace mrjsim::lp {

Result maximize(const std::vector<double>& c, const std::vector<std::vector<double>>& a, const std::vector<double>& b,
                double tol, std::size_t max_pivots) {
  const std::size_t m = a.size();
  const std::size_t n = c.size();
  if (b.size() != m) throw std::invalid_argument("constraint matrix and bound vector disagree");
  for (const auto& row : a)
    if (row.size() != n) throw std::invalid_argument("constraint row has the wrong width");
  for (double bi : b)
    if (bi < 0.0) throw std::invalid_argument("bounds must be nonnegative");

  // Columns 0..n-1 structural, n..n+m-1 slack, last column the rhs.
  const std::size_t width = n + m + 1;
  std::vector<double> t(m * width, 0.0);
  auto at = [&](std::size_t r, std::size_t col) -> double& { return t[r * width + col]; };
  for (std::size_t r = 0; r < m; ++r) {
    for (std::size_t j = 0; j < n; ++j) at(r, j) = a[r][j];
    at(r, n + r) = 1.0;
    at(r, width - 1) = b[r];
  }
  // Reduced costs of the current basis; positive entries improve the objective.
  std::vector<double> reduced(n + m, 0.0);
  for (std::size_t j = 0; j < n; ++j) reduced[j] = c[j];
  double objective = 0.0;
  std::vector<std::size_t> basis(m);
  for (std::size_t r = 0; r < m; ++r) basis[r] = n + r;

  Result result;
  for (std::size_t pivots = 0;; ++pivots) {
    if (pivots == max_pivots) {
      result.status = Status::IterationLimit;
      break;
    }
    std::size_t enter = n + m;
    for (std::size_t j = 0; j < n + m; ++j)
      if (reduced[j] > tol) {
        enter = j;
        break;
      }
    if (enter == n + m) break;

    std::size_t leave = m;
    double best = 0.0;
    for (std::size_t r = 0; r < m; ++r) {
      const double coef = at(r, enter);
      if (coef <= tol) continue;
      const double ratio = at(r, width - 1) / coef;
      if (leave == m || ratio < best - tol || (ratio <= best + tol && basis[r] < basis[leave])) {
        leave = r;
        best = ratio;
      }
    }
    if (leave == m) {
      result.status = Status::Unbounded;
      break;
    }

    const double piv = at(leave, enter);
    for (std::size_t col = 0; col < width; ++col) at(leave, col) /= piv;
    for (std::size_t r = 0; r < m; ++r) {
      if (r == leave) continue;
      const double f = at(r, enter);
      if (f == 0.0) continue;
      for (std::size_t col = 0; col < width; ++col) at(r, col) -= f * at(leave, col);
    }
    const double f = reduced[enter];
    for (std::size_t col = 0; col < n + m; ++col) reduced[col] -= f * at(leave, col);
    objective += f * at(leave, width - 1);
    basis[leave] = enter;
  }

  result.objective = objective;
  result.x.assign(n, 0.0);
  for (std::size_t r = 0; r < m; ++r)
    if (basis[r] < n) result.x[basis[r]] = at(r, width - 1);
  return result;
}

}  // namespace mrjsim::lp
