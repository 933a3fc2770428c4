#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace mrjsim {

// Bucket k in 1..K such that v lies in ((k-1)/K, k/K]. Products K*v within
// 1e-9 of an integer snap to that integer so exact grid points stay in
// their left bucket despite rounding.
int bucket_index(double v, int K);

// K-discretization of (0, 1]^d. Job types are the boxes I_i with i in
// {1..K_1} x ... x {1..K_d}; they are addressed by a dense row-major index
// (the last coordinate varies fastest), so for d = 1 type k has index k-1.
class Grid {
 public:
  Grid() : Grid(std::vector<int>{1}) {}
  explicit Grid(std::vector<int> k);
  static Grid uniform(int K, int dimension = 1);

  int dimension() const { return static_cast<int>(k_.size()); }
  std::span<const int> k() const { return k_; }
  int k(int l) const { return k_[static_cast<std::size_t>(l)]; }
  std::size_t num_types() const { return num_types_; }

  // 1-based per-resource bucket coordinates of a type.
  std::vector<int> coords(std::size_t type) const;
  int coord(std::size_t type, int l) const;
  std::size_t index(std::span<const int> coords) const;

  // Job type of a requirement vector. Throws std::invalid_argument when a
  // coordinate lies outside (0, 1] or the dimension does not match.
  std::size_t job_type(std::span<const double> v) const;

  // "3" for d = 1, "(2,1)" otherwise.
  std::string type_label(std::size_t type) const;

  bool operator==(const Grid& other) const { return k_ == other.k_; }

 private:
  std::vector<int> k_;
  std::vector<std::size_t> stride_;
  std::size_t num_types_ = 1;
};

}  // namespace mrjsim
