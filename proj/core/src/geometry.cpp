#include "radonms/geometry.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "radonms/error.hpp"

namespace radonms {

namespace {

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

int offsets_for(double x_max, double spacing) {
  return 2 * static_cast<int>(std::ceil(x_max / spacing)) + 1;
}

}  // namespace

ProjectionGeometry::ProjectionGeometry(int ndim, std::vector<Vec3> directions,
                                       std::vector<double> weights, int n_offsets, double x_max)
    : ndim_(ndim),
      directions_(std::move(directions)),
      weights_(std::move(weights)),
      n_offsets_(n_offsets),
      x_max_(x_max),
      offset_spacing_(0.0) {
  if (ndim_ != 2 && ndim_ != 3) throw InvalidArgument("projection geometry must be 2D or 3D");
  if (directions_.empty()) throw InvalidArgument("projection geometry needs directions");
  if (weights_.size() != directions_.size())
    throw InvalidArgument("one quadrature weight per direction is required");
  if (n_offsets_ < 2) throw InvalidArgument("n_offsets must be >= 2");
  if (!(x_max_ > 0.0) || !std::isfinite(x_max_)) throw InvalidArgument("x_max must be positive");
  offset_spacing_ = 2.0 * x_max_ / (n_offsets_ - 1);

  double total = 0.0;
  for (std::size_t j = 0; j < directions_.size(); ++j) {
    const Vec3& d = directions_[j];
    if (ndim_ == 2 && d[2] != 0.0) throw InvalidArgument("2D directions must have zero z");
    if (std::abs(std::sqrt(dot(d, d)) - 1.0) > 1e-12)
      throw InvalidArgument("direction " + std::to_string(j) + " is not a unit vector");
    if (!(weights_[j] > 0.0)) throw InvalidArgument("direction weights must be positive");
    total += weights_[j];
  }
  // Weights that already sum to one are kept as given.
  if (std::abs(total - 1.0) > 1e-12)
    for (double& w : weights_) w /= total;

  for (std::size_t a = 0; a < directions_.size(); ++a)
    for (std::size_t b = a + 1; b < directions_.size(); ++b) {
      const double c = dot(directions_[a], directions_[b]);
      if (std::abs(std::abs(c) - 1.0) < 1e-12)
        throw InvalidArgument("directions " + std::to_string(a) + " and " + std::to_string(b) +
                              " describe the same hyperplane family");
    }
}

ProjectionGeometry ProjectionGeometry::parallel_2d(int n_angles, int n_offsets, double x_max) {
  if (n_angles < 1) throw InvalidArgument("n_angles must be >= 1");
  std::vector<Vec3> dirs;
  dirs.reserve(n_angles);
  for (int j = 0; j < n_angles; ++j) {
    const double theta = std::numbers::pi * j / n_angles;
    dirs.push_back({std::cos(theta), std::sin(theta), 0.0});
  }
  return ProjectionGeometry(2, std::move(dirs), std::vector<double>(n_angles, 1.0), n_offsets,
                            x_max);
}

ProjectionGeometry ProjectionGeometry::hemisphere_3d(int n_directions, int n_offsets, double x_max) {
  if (n_directions < 1) throw InvalidArgument("n_directions must be >= 1");
  const double golden = std::numbers::pi * (3.0 - std::sqrt(5.0));
  std::vector<Vec3> dirs;
  dirs.reserve(n_directions);
  for (int j = 0; j < n_directions; ++j) {
    const double z = (j + 0.5) / n_directions;
    const double r = std::sqrt(1.0 - z * z);
    const double phi = golden * j;
    Vec3 d{r * std::cos(phi), r * std::sin(phi), z};
    const double norm = std::sqrt(dot(d, d));
    for (double& c : d) c /= norm;
    dirs.push_back(d);
  }
  return ProjectionGeometry(3, std::move(dirs), std::vector<double>(n_directions, 1.0), n_offsets,
                            x_max);
}

ProjectionGeometry ProjectionGeometry::covering_2d(const ImageGrid& grid, int n_angles,
                                                   double offset_spacing) {
  if (grid.ndim() != 2) throw GeometryMismatch("covering_2d needs a 2D grid");
  const int n = offsets_for(grid.circumradius(), offset_spacing);
  const double x_max = 0.5 * (n - 1) * offset_spacing;
  return parallel_2d(n_angles, n, x_max);
}

ProjectionGeometry ProjectionGeometry::covering_3d(const ImageGrid& grid, int n_directions,
                                                   double offset_spacing) {
  if (grid.ndim() != 3) throw GeometryMismatch("covering_3d needs a 3D grid");
  const int n = offsets_for(grid.circumradius(), offset_spacing);
  const double x_max = 0.5 * (n - 1) * offset_spacing;
  return hemisphere_3d(n_directions, n, x_max);
}

double ProjectionGeometry::sphere_measure() const {
  return ndim_ == 2 ? 2.0 * std::numbers::pi : 4.0 * std::numbers::pi;
}

Sinogram::Sinogram(ProjectionGeometry geometry)
    : geometry_(std::move(geometry)), values_(geometry_.sample_count(), 0.0) {}

Sinogram::Sinogram(ProjectionGeometry geometry, std::vector<double> values)
    : geometry_(std::move(geometry)), values_(std::move(values)) {
  if (values_.size() != geometry_.sample_count())
    throw InvalidArgument("sinogram value count does not match geometry");
  for (double v : values_)
    if (!std::isfinite(v)) throw InvalidArgument("sinogram contains non-finite values");
}

Sinogram& Sinogram::operator+=(const Sinogram& other) {
  if (!(geometry_ == other.geometry_)) throw GeometryMismatch("sinogram geometries differ");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] += other.values_[k];
  return *this;
}

Sinogram& Sinogram::operator-=(const Sinogram& other) {
  if (!(geometry_ == other.geometry_)) throw GeometryMismatch("sinogram geometries differ");
  for (std::size_t k = 0; k < values_.size(); ++k) values_[k] -= other.values_[k];
  return *this;
}

Sinogram& Sinogram::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Sinogram operator+(Sinogram a, const Sinogram& b) { return a += b; }
Sinogram operator-(Sinogram a, const Sinogram& b) { return a -= b; }
Sinogram operator*(double s, Sinogram a) { return a *= s; }

double inner(const Sinogram& a, const Sinogram& b) {
  if (!(a.geometry() == b.geometry())) throw GeometryMismatch("sinogram geometries differ");
  const auto& geo = a.geometry();
  double total = 0.0;
  for (int j = 0; j < geo.n_directions(); ++j) {
    double row = 0.0;
    const auto pa = a.profile(j);
    const auto pb = b.profile(j);
    for (std::size_t i = 0; i < pa.size(); ++i) row += pa[i] * pb[i];
    total += row * geo.sample_measure(j);
  }
  return total;
}

double l2_norm(const Sinogram& a) { return std::sqrt(inner(a, a)); }

}  // namespace radonms
