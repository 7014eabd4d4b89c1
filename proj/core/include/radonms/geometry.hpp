#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "radonms/grid.hpp"

namespace radonms {

/// Parallel-beam hyperplane parametrization (X, xi): the hyperplane
/// {x : xi . x = X}. Offsets are uniform on [-x_max, x_max]; directions cover a
/// half sphere only, one representative per (X, xi) ~ (-X, -xi) pair.
class ProjectionGeometry {
 public:
  /// Directions must be unit vectors with no antipodal or repeated pairs.
  /// Weights are positive direction-quadrature weights; they are normalized to
  /// sum to one (a probability measure on the stored half sphere).
  ProjectionGeometry(int ndim, std::vector<Vec3> directions, std::vector<double> weights,
                     int n_offsets, double x_max);

  /// n_angles uniform in [0, pi), equal weights.
  static ProjectionGeometry parallel_2d(int n_angles, int n_offsets, double x_max);
  /// Fibonacci lattice on the upper hemisphere, equal weights.
  static ProjectionGeometry hemisphere_3d(int n_directions, int n_offsets, double x_max);
  /// Offsets spaced at roughly `offset_spacing`, covering the grid box.
  static ProjectionGeometry covering_2d(const ImageGrid& grid, int n_angles,
                                        double offset_spacing);
  static ProjectionGeometry covering_3d(const ImageGrid& grid, int n_directions,
                                        double offset_spacing);

  int ndim() const { return ndim_; }
  int n_offsets() const { return n_offsets_; }
  int n_directions() const { return static_cast<int>(directions_.size()); }
  std::size_t sample_count() const {
    return static_cast<std::size_t>(n_offsets_) * directions_.size();
  }
  double x_max() const { return x_max_; }
  double offset_spacing() const { return offset_spacing_; }
  double offset(int i) const { return -x_max_ + i * offset_spacing_; }
  const Vec3& direction(int j) const { return directions_[j]; }
  double weight(int j) const { return weights_[j]; }
  std::span<const Vec3> directions() const { return directions_; }
  std::span<const double> weights() const { return weights_; }

  /// Surface area of the unit sphere S^{N-1}: 2 pi in 2D, 4 pi in 3D.
  double sphere_measure() const;
  /// Quadrature weight of one stored sample in the L^2(P^N) measure:
  /// |S^{N-1}| * w_j * offset_spacing. Summing over the quotient lattice
  /// reproduces the integral over the full covering R x S^{N-1}.
  double sample_measure(int j) const { return sphere_measure() * weights_[j] * offset_spacing_; }

  /// True when the offset range contains every hyperplane meeting the grid box.
  bool covers(const ImageGrid& grid) const { return x_max_ >= grid.circumradius(); }

  bool operator==(const ProjectionGeometry& other) const = default;

 private:
  int ndim_;
  std::vector<Vec3> directions_;
  std::vector<double> weights_;
  int n_offsets_;
  double x_max_;
  double offset_spacing_;
};

/// Samples g(X_i, xi_j), stored direction-major on the quotient lattice.
class Sinogram {
 public:
  explicit Sinogram(ProjectionGeometry geometry);
  Sinogram(ProjectionGeometry geometry, std::vector<double> values);

  const ProjectionGeometry& geometry() const { return geometry_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t k) const { return values_[k]; }
  double& operator[](std::size_t k) { return values_[k]; }
  double at(int direction, int offset) const {
    return values_[static_cast<std::size_t>(direction) * geometry_.n_offsets() + offset];
  }
  double& at(int direction, int offset) {
    return values_[static_cast<std::size_t>(direction) * geometry_.n_offsets() + offset];
  }
  std::span<const double> profile(int direction) const {
    return std::span<const double>(values_).subspan(
        static_cast<std::size_t>(direction) * geometry_.n_offsets(), geometry_.n_offsets());
  }

  /// Value on the full covering: `antipodal` selects (X, -xi_j) style lookups,
  /// i.e. g(X_i, -xi_j) = g(-X_i, xi_j).
  double covering_value(int direction, int offset, bool antipodal) const {
    return antipodal ? at(direction, geometry_.n_offsets() - 1 - offset) : at(direction, offset);
  }

  Sinogram& operator+=(const Sinogram& other);
  Sinogram& operator-=(const Sinogram& other);
  Sinogram& operator*=(double s);

 private:
  ProjectionGeometry geometry_;
  std::vector<double> values_;
};

Sinogram operator+(Sinogram a, const Sinogram& b);
Sinogram operator-(Sinogram a, const Sinogram& b);
Sinogram operator*(double s, Sinogram a);

/// Inner product and norm in the discrete L^2(P^N) measure (see sample_measure).
double inner(const Sinogram& a, const Sinogram& b);
double l2_norm(const Sinogram& a);

}  // namespace radonms
