#include "radonms/phantom.hpp"

#include <cmath>
#include <numbers>

#include "radonms/error.hpp"

namespace radonms {

bool EllipsoidComponent::contains(const Vec3& x, int ndim) const {
  const double dx = x[0] - center[0];
  const double dy = x[1] - center[1];
  const double c = std::cos(angle);
  const double s = std::sin(angle);
  const double u = c * dx + s * dy;
  const double v = -s * dx + c * dy;
  double r = (u / semi_axes[0]) * (u / semi_axes[0]) + (v / semi_axes[1]) * (v / semi_axes[1]);
  if (ndim == 3) {
    const double w = (x[2] - center[2]) / semi_axes[2];
    r += w * w;
  }
  return r <= 1.0;
}

void PhantomSpec::validate(int ndim) const {
  for (const auto& comp : components) {
    for (int a = 0; a < ndim; ++a)
      if (!(comp.semi_axes[a] > 0.0)) throw InvalidArgument("phantom semi-axes must be positive");
    if (!std::isfinite(comp.value) || !std::isfinite(comp.angle))
      throw InvalidArgument("phantom value and angle must be finite");
  }
}

Image rasterize_phantom(const PhantomSpec& spec, const ImageGrid& grid) {
  spec.validate(grid.ndim());
  Image img(grid);
  for (std::size_t i = 0; i < grid.cell_count(); ++i) {
    const Vec3 x = grid.center(i);
    double v = 0.0;
    for (const auto& comp : spec.components)
      if (comp.contains(x, grid.ndim())) v += comp.value;
    img[i] = v;
  }
  return img;
}

PhantomSpec shepp_logan_2d() {
  constexpr double deg = std::numbers::pi / 180.0;
  struct Row {
    double value, a, b, x0, y0, phi;
  };
  static constexpr Row rows[] = {
      {1.0, 0.69, 0.92, 0.0, 0.0, 0.0},         {-0.8, 0.6624, 0.874, 0.0, -0.0184, 0.0},
      {-0.2, 0.11, 0.31, 0.22, 0.0, -18.0},     {-0.2, 0.16, 0.41, -0.22, 0.0, 18.0},
      {0.1, 0.21, 0.25, 0.0, 0.35, 0.0},        {0.1, 0.046, 0.046, 0.0, 0.1, 0.0},
      {0.1, 0.046, 0.046, 0.0, -0.1, 0.0},      {0.1, 0.046, 0.023, -0.08, -0.605, 0.0},
      {0.1, 0.023, 0.023, 0.0, -0.606, 0.0},    {0.1, 0.023, 0.046, 0.06, -0.605, 0.0},
  };
  PhantomSpec spec;
  for (const Row& r : rows) {
    EllipsoidComponent c;
    c.center = {r.x0, r.y0, 0.0};
    c.semi_axes = {r.a, r.b, 1.0};
    c.angle = r.phi * deg;
    c.value = r.value;
    spec.components.push_back(c);
  }
  return spec;
}

PhantomSpec two_disks_2d(double value) {
  PhantomSpec spec;
  spec.components.push_back({{-0.35, 0.1, 0.0}, {0.3, 0.3, 1.0}, 0.0, value});
  spec.components.push_back({{0.4, -0.2, 0.0}, {0.22, 0.22, 1.0}, 0.0, value});
  return spec;
}

Image gaussian_image(const ImageGrid& grid, double sigma, double amplitude, const Vec3& center) {
  if (!(sigma > 0.0)) throw InvalidArgument("gaussian sigma must be positive");
  Image img(grid);
  const double inv = 1.0 / (2.0 * sigma * sigma);
  for (std::size_t i = 0; i < grid.cell_count(); ++i) {
    const Vec3 x = grid.center(i);
    double r2 = 0.0;
    for (int a = 0; a < grid.ndim(); ++a) r2 += (x[a] - center[a]) * (x[a] - center[a]);
    img[i] = amplitude * std::exp(-r2 * inv);
  }
  return img;
}

}  // namespace radonms
