#pragma once

#include <cstddef>
#include <vector>

namespace mrjsim::lp {

enum class Status { Optimal, Unbounded, IterationLimit };

struct Result {
  Status status = Status::Optimal;
  double objective = 0.0;
  std::vector<double> x;
};

// Dense tableau simplex for
//
//   maximize c.x  subject to  A x <= b,  x >= 0,  with b >= 0,
//
// so the slack basis is feasible from the start. Pivots follow Bland's
// rule, which cannot cycle on the degenerate vertices these problems have.
// `a` is row-major with one row per constraint.
Result maximize(const std::vector<double>& c, const std::vector<std::vector<double>>& a, const std::vector<double>& b,
                double tol = 1e-9, std::size_t max_pivots = 1'000'000);

}  // namespace mrjsim::lp
