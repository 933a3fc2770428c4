#include "mrjsim/grid.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mrjsim {

int bucket_index(double v, int K) {
  const double x = v * K;
  const double r = std::nearbyint(x);
  const int k = std::abs(x - r) <= 1e-9 * std::max(1.0, x) ? static_cast<int>(r)
                                                           : static_cast<int>(std::ceil(x));
  return std::clamp(k, 1, K);
}

Grid::Grid(std::vector<int> k) : k_(std::move(k)) {
  if (k_.empty()) throw std::invalid_argument("grid needs at least one resource");
  stride_.assign(k_.size(), 1);
  num_types_ = 1;
  for (std::size_t l = k_.size(); l-- > 0;) {
    if (k_[l] < 1) throw std::invalid_argument("every K_l must be at least 1");
    stride_[l] = num_types_;
    num_types_ *= static_cast<std::size_t>(k_[l]);
  }
}

Grid Grid::uniform(int K, int dimension) {
  if (dimension < 1) throw std::invalid_argument("dimension must be positive");
  return Grid(std::vector<int>(static_cast<std::size_t>(dimension), K));
}

std::vector<int> Grid::coords(std::size_t type) const {
  std::vector<int> out(k_.size());
  for (int l = 0; l < dimension(); ++l) out[static_cast<std::size_t>(l)] = coord(type, l);
  return out;
}

int Grid::coord(std::size_t type, int l) const {
  const auto ul = static_cast<std::size_t>(l);
  return static_cast<int>((type / stride_[ul]) % static_cast<std::size_t>(k_[ul])) + 1;
}

std::size_t Grid::index(std::span<const int> coords) const {
  if (coords.size() != k_.size()) throw std::invalid_argument("type dimension mismatch");
  std::size_t idx = 0;
  for (std::size_t l = 0; l < k_.size(); ++l) {
    if (coords[l] < 1 || coords[l] > k_[l]) throw std::invalid_argument("type coordinate out of range");
    idx += static_cast<std::size_t>(coords[l] - 1) * stride_[l];
  }
  return idx;
}

std::size_t Grid::job_type(std::span<const double> v) const {
  if (v.size() != k_.size()) throw std::invalid_argument("requirement dimension does not match the grid");
  std::size_t idx = 0;
  for (std::size_t l = 0; l < k_.size(); ++l) {
    if (!(v[l] > 0.0) || v[l] > 1.0) throw std::invalid_argument("requirement coordinate outside (0, 1]");
    idx += static_cast<std::size_t>(bucket_index(v[l], k_[l]) - 1) * stride_[l];
  }
  return idx;
}

std::string Grid::type_label(std::size_t type) const {
  if (dimension() == 1) return std::to_string(type + 1);
  std::string out = "(";
  for (int l = 0; l < dimension(); ++l) {
    if (l > 0) out += ',';
    out += std::to_string(coord(type, l));
  }
  return out + ")";
}

}  // namespace mrjsim
