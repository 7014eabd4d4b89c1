#include "radonms/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "radonms/error.hpp"

namespace radonms {

ImageGrid::ImageGrid(std::span<const int> dims, std::span<const double> spacing,
                     std::span<const double> origin) {
  const std::size_t n = dims.size();
  if (n < 2 || n > 3) throw InvalidArgument("grid must be 2D or 3D");
  if (spacing.size() != n || origin.size() != n)
    throw InvalidArgument("grid dims, spacing and origin must have the same length");
  ndim_ = static_cast<int>(n);
  for (std::size_t a = 0; a < n; ++a) {
    if (dims[a] < 2) throw InvalidArgument("grid dim " + std::to_string(a) + " must be >= 2");
    if (!(spacing[a] > 0.0) || !std::isfinite(spacing[a]))
      throw InvalidArgument("grid spacing " + std::to_string(a) + " must be positive");
    if (!std::isfinite(origin[a])) throw InvalidArgument("grid origin must be finite");
    dims_[a] = dims[a];
    spacing_[a] = spacing[a];
    origin_[a] = origin[a];
  }
}

std::size_t ImageGrid::cell_count() const {
  return static_cast<std::size_t>(dims_[0]) * dims_[1] * dims_[2];
}

double ImageGrid::cell_volume() const {
  double v = 1.0;
  for (int a = 0; a < ndim_; ++a) v *= spacing_[a];
  return v;
}

double ImageGrid::min_spacing() const {
  double h = spacing_[0];
  for (int a = 1; a < ndim_; ++a) h = std::min(h, spacing_[a]);
  return h;
}

Index3 ImageGrid::multi_index(std::size_t linear) const {
  Index3 idx{0, 0, 0};
  idx[0] = static_cast<int>(linear % dims_[0]);
  linear /= dims_[0];
  idx[1] = static_cast<int>(linear % dims_[1]);
  idx[2] = static_cast<int>(linear / dims_[1]);
  return idx;
}

Vec3 ImageGrid::box_lo() const {
  Vec3 lo{0.0, 0.0, 0.0};
  for (int a = 0; a < ndim_; ++a) lo[a] = origin_[a] - 0.5 * spacing_[a];
  return lo;
}

Vec3 ImageGrid::box_hi() const {
  Vec3 hi{0.0, 0.0, 0.0};
  for (int a = 0; a < ndim_; ++a) hi[a] = origin_[a] + (dims_[a] - 0.5) * spacing_[a];
  return hi;
}

double ImageGrid::circumradius() const {
  const Vec3 lo = box_lo();
  const Vec3 hi = box_hi();
  double r2 = 0.0;
  for (int a = 0; a < ndim_; ++a) {
    const double m = std::max(std::abs(lo[a]), std::abs(hi[a]));
    r2 += m * m;
  }
  return std::sqrt(r2);
}

ImageGrid ImageGrid::padded(int margin) const {
  if (margin < 0) throw InvalidArgument("padding margin must be nonnegative");
  std::vector<int> d(ndim_);
  std::vector<double> s(ndim_), o(ndim_);
  for (int a = 0; a < ndim_; ++a) {
    d[a] = dims_[a] + 2 * margin;
    s[a] = spacing_[a];
    o[a] = origin_[a] - margin * spacing_[a];
  }
  return ImageGrid(d, s, o);
}

ImageGrid make_grid(std::initializer_list<int> dims, std::initializer_list<double> spacing,
                    std::initializer_list<double> origin) {
  return ImageGrid(std::span<const int>(dims.begin(), dims.size()),
                   std::span<const double>(spacing.begin(), spacing.size()),
                   std::span<const double>(origin.begin(), origin.size()));
}

ImageGrid centered_grid(int ndim, int n, double half_width) {
  if (!(half_width > 0.0)) throw InvalidArgument("half_width must be positive");
  const double h = 2.0 * half_width / n;
  std::vector<int> d(ndim, n);
  std::vector<double> s(ndim, h), o(ndim, -half_width + 0.5 * h);
  return ImageGrid(d, s, o);
}

Image::Image(ImageGrid grid) : grid_(grid), values_(grid.cell_count(), 0.0) {}

Image::Image(ImageGrid grid, std::vector<double> values)
    : grid_(grid), values_(std::move(values)) {
  if (values_.size() != grid_.cell_count())
    throw InvalidArgument("image value count " + std::to_string(values_.size()) +
                          " does not match grid cell count " +
                          std::to_string(grid_.cell_count()));
  check_finite();
}

void Image::check_finite() const {
  for (double v : values_)
    if (!std::isfinite(v)) throw InvalidArgument("image contains non-finite values");
}

Image& Image::operator+=(const Image& other) {
  if (!(grid_ == other.grid_)) throw GeometryMismatch("image grids differ");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] += other.values_[i];
  return *this;
}

Image& Image::operator-=(const Image& other) {
  if (!(grid_ == other.grid_)) throw GeometryMismatch("image grids differ");
  for (std::size_t i = 0; i < values_.size(); ++i) values_[i] -= other.values_[i];
  return *this;
}

Image& Image::operator*=(double s) {
  for (double& v : values_) v *= s;
  return *this;
}

Image operator+(Image a, const Image& b) { return a += b; }
Image operator-(Image a, const Image& b) { return a -= b; }
Image operator*(double s, Image a) { return a *= s; }

double inner(const Image& a, const Image& b) {
  if (!(a.grid() == b.grid())) throw GeometryMismatch("image grids differ");
  double sum = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) sum += a[i] * b[i];
  return sum * a.grid().cell_volume();
}

double l2_norm(const Image& a) { return std::sqrt(inner(a, a)); }

double relative_l2_error(const Image& a, const Image& b) {
  if (!(a.grid() == b.grid())) throw GeometryMismatch("relative_l2_error: image grids differ");
  const double denom = l2_norm(b);
  const double num = l2_norm(a - b);
  return denom > 0.0 ? num / denom : num;
}

double total_mass(const Image& a) {
  double sum = 0.0;
  for (double v : a.values()) sum += v;
  return sum * a.grid().cell_volume();
}

}  // namespace radonms
