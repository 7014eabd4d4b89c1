#include "radonms/footprint.hpp"

#include <algorithm>

namespace radonms {

BoxSpline::BoxSpline(std::vector<double> widths) {
  const double widest = widths.empty() ? 0.0 : *std::max_element(widths.begin(), widths.end());
  long double prod = 1.0L;
  for (double w : widths) {
    if (w <= 1e-4 * widest) continue;
    widths_.push_back(w);
    prod *= w;
    half_support_ += 0.5 * w;
  }
  long double fact = 1.0L;
  for (std::size_t k = 2; k < widths_.size(); ++k) fact *= static_cast<long double>(k);
  scale_ = widths_.empty() ? 0.0L : 1.0L / (fact * prod);
}

// Truncated-power form: sum over subsets S of (-1)^|S| (t + W/2 - sum_S w)_+^(n-1).
double BoxSpline::operator()(double t) const {
  if (std::abs(t) >= half_support_) return 0.0;
  const std::size_t n = widths_.size();
  const long double base = static_cast<long double>(t) + half_support_;
  long double sum = 0.0L;
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    long double arg = base;
    int sign = 1;
    for (std::size_t k = 0; k < n; ++k)
      if (mask & (std::size_t{1} << k)) {
        arg -= widths_[k];
        sign = -sign;
      }
    if (arg <= 0.0L) continue;
    long double pw = 1.0L;
    for (std::size_t e = 1; e < n; ++e) pw *= arg;
    sum += sign * pw;
  }
  const double v = static_cast<double>(sum * scale_);
  return v > 0.0 ? v : 0.0;
}

CellFootprint::CellFootprint(const ProjectionGeometry& geometry, const ImageGrid& grid)
    : geometry_(geometry), grid_(grid), cell_volume_(grid.cell_volume()) {
  kernels_.reserve(geometry.n_directions());
  box_half_.reserve(geometry.n_directions());
  for (int j = 0; j < geometry.n_directions(); ++j) {
    const Vec3& xi = geometry.direction(j);
    std::vector<double> widths;
    double half = 0.0;
    for (int a = 0; a < grid.ndim(); ++a) {
      const double w = grid.spacing(a) * std::abs(xi[a]);
      widths.push_back(w);
      half += 0.5 * w;
    }
    widths.push_back(geometry.offset_spacing());
    widths.push_back(geometry.offset_spacing());
    kernels_.emplace_back(std::move(widths));
    box_half_.push_back(half);
  }
}

}  // namespace radonms
