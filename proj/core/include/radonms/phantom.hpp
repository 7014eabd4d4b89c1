#pragma once

#include <vector>

#include "radonms/grid.hpp"

namespace radonms {

/// Ellipse (2D) or ellipsoid (3D) with an additive density value. The rotation
/// angle turns the semi-axes within the x-y plane (radians, counterclockwise).
struct EllipsoidComponent {
  Vec3 center{0.0, 0.0, 0.0};
  Vec3 semi_axes{1.0, 1.0, 1.0};
  double angle = 0.0;
  double value = 1.0;

  bool contains(const Vec3& x, int ndim) const;
};

struct PhantomSpec {
  std::vector<EllipsoidComponent> components;

  /// Throws InvalidArgument unless every active semi-axis is positive.
  void validate(int ndim) const;
};

/// Cell-center sampling: each cell gets the sum of the values of all
/// components containing its center.
Image rasterize_phantom(const PhantomSpec& spec, const ImageGrid& grid);

/// Modified Shepp-Logan head phantom on [-1, 1]^2 (Toft's contrast values).
PhantomSpec shepp_logan_2d();

/// Two disjoint disks of equal value; a two-region piecewise-constant fixture.
PhantomSpec two_disks_2d(double value = 1.0);

/// Samples exp(-|x - center|^2 / (2 sigma^2)) * amplitude at cell centers.
Image gaussian_image(const ImageGrid& grid, double sigma, double amplitude = 1.0,
                     const Vec3& center = {0.0, 0.0, 0.0});

}  // namespace radonms
