#pragma once

#include <cmath>
#include <cstddef>
#include <vector>

#include "radonms/geometry.hpp"
#include "radonms/grid.hpp"

namespace radonms {

/// Density of a sum of independent centered uniform variables (a box spline).
/// Widths below 1e-4 of the largest width are treated as point masses.
class BoxSpline {
 public:
  BoxSpline() = default;
  explicit BoxSpline(std::vector<double> widths);

  double operator()(double t) const;
  double half_support() const { return half_support_; }

 private:
  std::vector<long double> widths_;
  long double scale_ = 0.0L;
  double half_support_ = 0.0;
};

/// Weights of the discrete Radon matrix, A[(j, i), c]: the integral over cell c
/// of the linear interpolation hat centred on offset X_i, divided by the offset
/// spacing. For direction xi the cell's projection is the convolution of boxes
/// of width h_a |xi_a|, and the hat is the convolution of two boxes of width
/// dX, so A[(j, i), c] = cell_volume * BoxSpline(X_i - xi . x_c).
class CellFootprint {
 public:
  CellFootprint(const ProjectionGeometry& geometry, const ImageGrid& grid);

  /// Calls visit(i, weight) for every offset i with a nonzero weight. Returns
  /// false, without visiting, when the cell's projection leaves [-x_max, x_max].
  template <class Visit>
  bool visit(std::size_t cell, int direction, Visit&& visit) const {
    const Vec3 x = grid_.center(cell);
    const Vec3& xi = geometry_.direction(direction);
    const double p = xi[0] * x[0] + xi[1] * x[1] + xi[2] * x[2];
    const double xmax = geometry_.x_max();
    const double box = box_half_[direction];
    if (p - box < -xmax * (1.0 + 1e-12) || p + box > xmax * (1.0 + 1e-12)) return false;
    const BoxSpline& k = kernels_[direction];
    const double dx = geometry_.offset_spacing();
    const double h = k.half_support();
    int lo = static_cast<int>(std::ceil((p - h + xmax) / dx));
    int hi = static_cast<int>(std::floor((p + h + xmax) / dx));
    if (lo < 0) lo = 0;
    if (hi > geometry_.n_offsets() - 1) hi = geometry_.n_offsets() - 1;
    for (int i = lo; i <= hi; ++i) {
      const double w = cell_volume_ * k(geometry_.offset(i) - p);
      if (w > 0.0) visit(i, w);
    }
    return true;
  }

 private:
  const ProjectionGeometry& geometry_;
  ImageGrid grid_;
  double cell_volume_;
  std::vector<BoxSpline> kernels_;
  std::vector<double> box_half_;
};

}  // namespace radonms
