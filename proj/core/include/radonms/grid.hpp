#pragma once

#include <array>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace radonms {

using Vec3 = std::array<double, 3>;
using Index3 = std::array<int, 3>;

/// Regular 2D or 3D cell grid. Axis 0 varies fastest in the linear cell index.
/// Unused axes of a 2D grid have dim 1, spacing 1 and origin 0.
class ImageGrid {
 public:
  ImageGrid(std::span<const int> dims, std::span<const double> spacing,
            std::span<const double> origin);

  int ndim() const { return ndim_; }
  int dim(int axis) const { return dims_[axis]; }
  double spacing(int axis) const { return spacing_[axis]; }
  double origin(int axis) const { return origin_[axis]; }
  std::size_t cell_count() const;
  double cell_volume() const;
  double extent(int axis) const { return dims_[axis] * spacing_[axis]; }
  double min_spacing() const;

  std::size_t linear_index(const Index3& idx) const {
    return static_cast<std::size_t>(idx[0]) +
           static_cast<std::size_t>(dims_[0]) *
               (static_cast<std::size_t>(idx[1]) +
                static_cast<std::size_t>(dims_[1]) * static_cast<std::size_t>(idx[2]));
  }
  Index3 multi_index(std::size_t linear) const;
  /// Physical coordinates of a cell center.
  Vec3 center(const Index3& idx) const {
    return {origin_[0] + idx[0] * spacing_[0], origin_[1] + idx[1] * spacing_[1],
            origin_[2] + idx[2] * spacing_[2]};
  }
  Vec3 center(std::size_t linear) const { return center(multi_index(linear)); }

  /// Lower/upper corners of the grid box (cell faces, not centers).
  Vec3 box_lo() const;
  Vec3 box_hi() const;
  /// Largest distance from the coordinate origin to a point of the grid box.
  double circumradius() const;

  /// Same spacing, `margin` extra cells on each side of every active axis.
  ImageGrid padded(int margin) const;

  bool operator==(const ImageGrid& other) const = default;

 private:
  int ndim_ = 0;
  Index3 dims_{1, 1, 1};
  Vec3 spacing_{1.0, 1.0, 1.0};
  Vec3 origin_{0.0, 0.0, 0.0};
};

ImageGrid make_grid(std::initializer_list<int> dims, std::initializer_list<double> spacing,
                    std::initializer_list<double> origin);

/// n^ndim cells covering [-half_width, half_width]^ndim.
ImageGrid centered_grid(int ndim, int n, double half_width);

/// Sampled scalar density on an ImageGrid.
class Image {
 public:
  explicit Image(ImageGrid grid);
  Image(ImageGrid grid, std::vector<double> values);

  const ImageGrid& grid() const { return grid_; }
  std::span<const double> values() const { return values_; }
  std::span<double> values() { return values_; }
  std::size_t size() const { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }
  double& operator[](std::size_t i) { return values_[i]; }
  double at(const Index3& idx) const { return values_[grid_.linear_index(idx)]; }

  /// Throws InvalidArgument on NaN or Inf.
  void check_finite() const;

  Image& operator+=(const Image& other);
  Image& operator-=(const Image& other);
  Image& operator*=(double s);

 private:
  ImageGrid grid_;
  std::vector<double> values_;
};

Image operator+(Image a, const Image& b);
Image operator-(Image a, const Image& b);
Image operator*(double s, Image a);

/// Volume-weighted inner product and norm: sum(a*b) * cell volume.
double inner(const Image& a, const Image& b);
double l2_norm(const Image& a);

/// ||a - b|| / ||b||, or ||a|| when b is identically zero.
double relative_l2_error(const Image& a, const Image& b);

/// Sum of values times cell volume.
double total_mass(const Image& a);

}  // namespace radonms
