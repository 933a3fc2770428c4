#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "mrjsim/grid.hpp"

namespace mrjsim {

using Rng = std::mt19937_64;

// Uniform draw on [0, 1) with 53 random bits.
inline double uniform01(Rng& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

// Exp(rate) draw.
double exponential(Rng& rng, double rate);

inline constexpr int kMaxResources = 4;

// Fixed-capacity requirement vector; one coordinate per resource.
struct Requirement {
  std::array<double, kMaxResources> v{};
  int dim = 1;

  Requirement() = default;
  Requirement(std::initializer_list<double> values);
  explicit Requirement(std::span<const double> values);

  double operator[](int l) const { return v[static_cast<std::size_t>(l)]; }
  double& operator[](int l) { return v[static_cast<std::size_t>(l)]; }
  double max_coordinate() const;
  std::span<const double> values() const { return {v.data(), static_cast<std::size_t>(dim)}; }
};

enum class DistKind {
  Uniform,
  TruncatedNormal,
  BoundedLomax,
  TriangularDecreasing,
  SymmetricTriangular,
  PointMass,
  Empirical,
};

// One-dimensional requirement law on (0, 1].
class Dist1D {
 public:
  static Dist1D uniform();
  static Dist1D truncated_normal(double mean = 0.5, double sd = 1.0);
  static Dist1D bounded_lomax(double shape = 2.0, double scale = 1.0);
  static Dist1D triangular_decreasing();
  static Dist1D symmetric_triangular(double lower, double upper);
  static Dist1D point_mass(double value);
  // Values must lie in (0, 1]; they are copied and sorted.
  static Dist1D empirical(std::vector<double> values);

  DistKind kind() const { return kind_; }
  std::string name() const;
  bool is_atomic() const { return kind_ == DistKind::PointMass || kind_ == DistKind::Empirical; }

  // Throws std::domain_error for atomic laws, which have no density.
  double pdf(double v) const;
  double cdf(double v) const;
  double sample(Rng& rng) const;
  double mean() const;
  // P(V in ((k-1)/K, k/K]).
  double bucket_mass(int K, int k) const;

  std::span<const double> empirical_values() const;
  double point_value() const { return a_; }

  // Density symmetric about 1/2 on [0, 1].
  bool symmetric_about_half() const;
  // Density weakly decreasing on (0, 1].
  bool weakly_decreasing_density() const;

 private:
  DistKind kind_ = DistKind::Uniform;
  double a_ = 0.0;  // mean | shape | lower | point
  double b_ = 0.0;  // sd | scale | upper
  double norm_ = 1.0;  // truncation mass for TN and bounded Lomax
  std::shared_ptr<const std::vector<double>> values_;
};

// Requirement law on (0, 1]^d: a product of independent coordinates. A
// single coordinate is the usual one-resource case.
class RequirementDist {
 public:
  RequirementDist() : coords_{Dist1D::uniform()} {}
  RequirementDist(Dist1D coord) : coords_{std::move(coord)} {}  // NOLINT(google-explicit-constructor)
  static RequirementDist product(std::vector<Dist1D> coords);

  int dimension() const { return static_cast<int>(coords_.size()); }
  const Dist1D& coordinate(int l) const { return coords_.at(static_cast<std::size_t>(l)); }
  std::string name() const;

  double pdf(std::span<const double> v) const;
  Requirement sample(Rng& rng) const;
  std::vector<double> mean() const;
  double max_mean() const;

 private:
  std::vector<Dist1D> coords_;
};

// P(V in I_type) for the box of `type` under `grid`. Sums to one over the
// grid's types.
double bucket_probability(const RequirementDist& dist, const Grid& grid, std::size_t type);
std::vector<double> bucket_probabilities(const RequirementDist& dist, const Grid& grid);

struct ArrivalSpec {
  double lambda = 1.0;
  RequirementDist dist;

  ArrivalSpec() = default;
  ArrivalSpec(double lambda, RequirementDist dist);
};

}  // namespace mrjsim
