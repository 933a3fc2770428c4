#include "mrjsim/requirements.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace mrjsim {

namespace {

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

double std_normal_pdf(double x) { return std::exp(-0.5 * x * x) / std::sqrt(2.0 * std::numbers::pi); }

std::string fmt_param(double x) {
  std::ostringstream os;
  os << x;
  return os.str();
}

}  // namespace

double exponential(Rng& rng, double rate) { return -std::log1p(-uniform01(rng)) / rate; }

Requirement::Requirement(std::initializer_list<double> values)
    : Requirement(std::span<const double>(values.begin(), values.size())) {}

Requirement::Requirement(std::span<const double> values) {
  if (values.empty() || values.size() > static_cast<std::size_t>(kMaxResources))
    throw std::invalid_argument("requirement dimension must be in 1.." + std::to_string(kMaxResources));
  dim = static_cast<int>(values.size());
  std::copy(values.begin(), values.end(), v.begin());
}

double Requirement::max_coordinate() const {
  return *std::max_element(v.begin(), v.begin() + dim);
}

Dist1D Dist1D::uniform() { return Dist1D{}; }

Dist1D Dist1D::truncated_normal(double mean, double sd) {
  if (!(sd > 0.0)) throw std::invalid_argument("truncated normal needs sd > 0");
  Dist1D d;
  d.kind_ = DistKind::TruncatedNormal;
  d.a_ = mean;
  d.b_ = sd;
  d.norm_ = std_normal_cdf((1.0 - mean) / sd) - std_normal_cdf(-mean / sd);
  if (!(d.norm_ > 0.0)) throw std::invalid_argument("truncated normal has no mass on [0, 1]");
  return d;
}

Dist1D Dist1D::bounded_lomax(double shape, double scale) {
  if (!(shape > 0.0) || !(scale > 0.0)) throw std::invalid_argument("bounded Lomax needs shape, scale > 0");
  Dist1D d;
  d.kind_ = DistKind::BoundedLomax;
  d.a_ = shape;
  d.b_ = scale;
  d.norm_ = 1.0 - std::pow(1.0 + 1.0 / scale, -shape);
  return d;
}

Dist1D Dist1D::triangular_decreasing() {
  Dist1D d;
  d.kind_ = DistKind::TriangularDecreasing;
  return d;
}

Dist1D Dist1D::symmetric_triangular(double lower, double upper) {
  if (!(lower >= 0.0 && lower < upper && upper <= 1.0))
    throw std::invalid_argument("symmetric triangular needs 0 <= lower < upper <= 1");
  Dist1D d;
  d.kind_ = DistKind::SymmetricTriangular;
  d.a_ = lower;
  d.b_ = upper;
  return d;
}

Dist1D Dist1D::point_mass(double value) {
  if (!(value > 0.0 && value <= 1.0)) throw std::invalid_argument("point mass must lie in (0, 1]");
  Dist1D d;
  d.kind_ = DistKind::PointMass;
  d.a_ = value;
  return d;
}

Dist1D Dist1D::empirical(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("empirical distribution needs at least one value");
  for (double x : values)
    if (!(x > 0.0 && x <= 1.0)) throw std::invalid_argument("empirical values must lie in (0, 1]");
  std::sort(values.begin(), values.end());
  Dist1D d;
  d.kind_ = DistKind::Empirical;
  d.values_ = std::make_shared<const std::vector<double>>(std::move(values));
  return d;
}

std::string Dist1D::name() const {
  switch (kind_) {
    case DistKind::Uniform:
      return "uniform";
    case DistKind::TruncatedNormal:
      return "truncnormal(" + fmt_param(a_) + "," + fmt_param(b_) + ")";
    case DistKind::BoundedLomax:
      return "lomax(" + fmt_param(a_) + "," + fmt_param(b_) + ")";
    case DistKind::TriangularDecreasing:
      return "triangular";
    case DistKind::SymmetricTriangular:
      return "symtri(" + fmt_param(a_) + "," + fmt_param(b_) + ")";
    case DistKind::PointMass:
      return "pointmass(" + fmt_param(a_) + ")";
    case DistKind::Empirical:
      return "empirical(n=" + std::to_string(values_->size()) + ")";
  }
  return "unknown";
}

double Dist1D::pdf(double v) const {
  if (is_atomic()) throw std::domain_error(name() + " has no density");
  switch (kind_) {
    case DistKind::Uniform:
      return v > 0.0 && v <= 1.0 ? 1.0 : 0.0;
    case DistKind::TruncatedNormal:
      if (v < 0.0 || v > 1.0) return 0.0;
      return std_normal_pdf((v - a_) / b_) / (b_ * norm_);
    case DistKind::BoundedLomax:
      if (v < 0.0 || v > 1.0) return 0.0;
      return a_ / b_ * std::pow(1.0 + v / b_, -(a_ + 1.0)) / norm_;
    case DistKind::TriangularDecreasing:
      return v >= 0.0 && v <= 1.0 ? 2.0 - 2.0 * v : 0.0;
    case DistKind::SymmetricTriangular: {
      const double w = b_ - a_;
      const double mid = 0.5 * (a_ + b_);
      if (v < a_ || v > b_) return 0.0;
      return v <= mid ? 4.0 * (v - a_) / (w * w) : 4.0 * (b_ - v) / (w * w);
    }
    default:
      return 0.0;
  }
}

double Dist1D::cdf(double v) const {
  if (v <= 0.0) return 0.0;
  if (v >= 1.0) return 1.0;
  switch (kind_) {
    case DistKind::Uniform:
      return v;
    case DistKind::TruncatedNormal:
      return (std_normal_cdf((v - a_) / b_) - std_normal_cdf(-a_ / b_)) / norm_;
    case DistKind::BoundedLomax:
      return (1.0 - std::pow(1.0 + v / b_, -a_)) / norm_;
    case DistKind::TriangularDecreasing:
      return 2.0 * v - v * v;
    case DistKind::SymmetricTriangular: {
      const double w = b_ - a_;
      if (v <= a_) return 0.0;
      if (v >= b_) return 1.0;
      if (v <= 0.5 * (a_ + b_)) return 2.0 * (v - a_) * (v - a_) / (w * w);
      return 1.0 - 2.0 * (b_ - v) * (b_ - v) / (w * w);
    }
    case DistKind::PointMass:
      return v >= a_ ? 1.0 : 0.0;
    case DistKind::Empirical: {
      const auto& xs = *values_;
      const auto it = std::upper_bound(xs.begin(), xs.end(), v);
      return static_cast<double>(it - xs.begin()) / static_cast<double>(xs.size());
    }
  }
  return 0.0;
}

double Dist1D::sample(Rng& rng) const {
  switch (kind_) {
    case DistKind::Uniform:
      return 1.0 - uniform01(rng);
    case DistKind::TruncatedNormal: {
      std::normal_distribution<double> normal(a_, b_);
      for (;;) {
        const double z = normal(rng);
        if (z > 0.0 && z <= 1.0) return z;
      }
    }
    case DistKind::BoundedLomax: {
      const double u = 1.0 - uniform01(rng);  // (0, 1]
      return b_ * (std::pow(1.0 - u * norm_, -1.0 / a_) - 1.0);
    }
    case DistKind::TriangularDecreasing:
      return 1.0 - std::sqrt(uniform01(rng));
    case DistKind::SymmetricTriangular: {
      const double u = 1.0 - uniform01(rng);
      const double w = b_ - a_;
      return u <= 0.5 ? a_ + w * std::sqrt(0.5 * u) : b_ - w * std::sqrt(0.5 * (1.0 - u));
    }
    case DistKind::PointMass:
      return a_;
    case DistKind::Empirical: {
      const auto& xs = *values_;
      auto idx = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(xs.size()));
      return xs[std::min(idx, xs.size() - 1)];
    }
  }
  return 0.0;
}

double Dist1D::mean() const {
  switch (kind_) {
    case DistKind::Uniform:
      return 0.5;
    case DistKind::TruncatedNormal: {
      const double lo = -a_ / b_;
      const double hi = (1.0 - a_) / b_;
      return a_ + b_ * (std_normal_pdf(lo) - std_normal_pdf(hi)) / norm_;
    }
    case DistKind::BoundedLomax: {
      // E V = int_0^1 (1 - F(v)) dv.
      const double tail_at_one = std::pow(1.0 + 1.0 / b_, -a_);
      const double integral = a_ == 1.0 ? b_ * std::log1p(1.0 / b_)
                                        : b_ * (std::pow(1.0 + 1.0 / b_, 1.0 - a_) - 1.0) / (1.0 - a_);
      return (integral - tail_at_one) / norm_;
    }
    case DistKind::TriangularDecreasing:
      return 1.0 / 3.0;
    case DistKind::SymmetricTriangular:
      return 0.5 * (a_ + b_);
    case DistKind::PointMass:
      return a_;
    case DistKind::Empirical: {
      double s = 0.0;
      for (double x : *values_) s += x;
      return s / static_cast<double>(values_->size());
    }
  }
  return 0.0;
}

double Dist1D::bucket_mass(int K, int k) const {
  if (K < 1 || k < 1 || k > K) throw std::invalid_argument("bucket index out of range");
  if (kind_ == DistKind::PointMass) return bucket_index(a_, K) == k ? 1.0 : 0.0;
  if (kind_ == DistKind::Empirical) {
    const auto& xs = *values_;
    auto upto = [&](int b) {
      return std::partition_point(xs.begin(), xs.end(), [&](double x) { return bucket_index(x, K) <= b; }) -
             xs.begin();
    };
    return static_cast<double>(upto(k) - upto(k - 1)) / static_cast<double>(xs.size());
  }
  const double hi = k == K ? 1.0 : cdf(static_cast<double>(k) / K);
  const double lo = k == 1 ? 0.0 : cdf(static_cast<double>(k - 1) / K);
  return hi - lo;
}

std::span<const double> Dist1D::empirical_values() const {
  if (!values_) return {};
  return *values_;
}

bool Dist1D::symmetric_about_half() const {
  switch (kind_) {
    case DistKind::Uniform:
      return true;
    case DistKind::TruncatedNormal:
      return a_ == 0.5;
    case DistKind::SymmetricTriangular:
      return a_ + b_ == 1.0;
    default:
      return false;
  }
}

bool Dist1D::weakly_decreasing_density() const {
  switch (kind_) {
    case DistKind::Uniform:
    case DistKind::BoundedLomax:
    case DistKind::TriangularDecreasing:
      return true;
    case DistKind::TruncatedNormal:
      return a_ <= 0.0;
    default:
      return false;
  }
}

RequirementDist RequirementDist::product(std::vector<Dist1D> coords) {
  if (coords.empty() || coords.size() > static_cast<std::size_t>(kMaxResources))
    throw std::invalid_argument("product needs 1.." + std::to_string(kMaxResources) + " coordinates");
  RequirementDist d;
  d.coords_ = std::move(coords);
  return d;
}

std::string RequirementDist::name() const {
  if (coords_.size() == 1) return coords_[0].name();
  std::string out;
  for (std::size_t l = 0; l < coords_.size(); ++l) {
    if (l > 0) out += '*';
    out += coords_[l].name();
  }
  return out;
}

double RequirementDist::pdf(std::span<const double> v) const {
  if (v.size() != coords_.size()) throw std::invalid_argument("requirement dimension does not match the distribution");
  double p = 1.0;
  for (std::size_t l = 0; l < coords_.size(); ++l) p *= coords_[l].pdf(v[l]);
  return p;
}

Requirement RequirementDist::sample(Rng& rng) const {
  Requirement r;
  r.dim = dimension();
  for (std::size_t l = 0; l < coords_.size(); ++l) r.v[l] = coords_[l].sample(rng);
  return r;
}

std::vector<double> RequirementDist::mean() const {
  std::vector<double> m;
  m.reserve(coords_.size());
  for (const auto& c : coords_) m.push_back(c.mean());
  return m;
}

double RequirementDist::max_mean() const {
  const auto m = mean();
  return *std::max_element(m.begin(), m.end());
}

double bucket_probability(const RequirementDist& dist, const Grid& grid, std::size_t type) {
  if (grid.dimension() != dist.dimension()) throw std::invalid_argument("grid dimension does not match the distribution");
  if (type >= grid.num_types()) throw std::invalid_argument("job type index out of range");
  double p = 1.0;
  for (int l = 0; l < grid.dimension(); ++l) p *= dist.coordinate(l).bucket_mass(grid.k(l), grid.coord(type, l));
  return p;
}

std::vector<double> bucket_probabilities(const RequirementDist& dist, const Grid& grid) {
  if (grid.dimension() != dist.dimension()) throw std::invalid_argument("grid dimension does not match the distribution");
  std::vector<std::vector<double>> marginal(static_cast<std::size_t>(grid.dimension()));
  for (int l = 0; l < grid.dimension(); ++l)
    for (int k = 1; k <= grid.k(l); ++k) marginal[static_cast<std::size_t>(l)].push_back(dist.coordinate(l).bucket_mass(grid.k(l), k));
  std::vector<double> out(grid.num_types(), 1.0);
  for (std::size_t t = 0; t < out.size(); ++t)
    for (int l = 0; l < grid.dimension(); ++l)
      out[t] *= marginal[static_cast<std::size_t>(l)][static_cast<std::size_t>(grid.coord(t, l) - 1)];
  return out;
}

ArrivalSpec::ArrivalSpec(double lambda_, RequirementDist dist_) : lambda(lambda_), dist(std::move(dist_)) {
  if (!(lambda > 0.0)) throw std::invalid_argument("arrival rate must be positive");
}

}  // namespace mrjsim
