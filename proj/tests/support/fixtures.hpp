#pragma once

#include <random>
#include <vector>

#include "radonms/geometry.hpp"
#include "radonms/grid.hpp"
#include "radonms/ms.hpp"
#include "radonms/phantom.hpp"

namespace radonms::testing {

inline Image random_image(const ImageGrid& grid, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Image f(grid);
  for (double& v : f.values()) v = nd(rng);
  return f;
}

inline Sinogram random_sinogram(const ProjectionGeometry& geo, unsigned seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> nd;
  Sinogram g(geo);
  for (double& v : g.values()) v = nd(rng);
  return g;
}

inline PhantomSpec unit_disk() {
  PhantomSpec s;
  EllipsoidComponent c;
  c.semi_axes = {1.0, 1.0, 1.0};
  s.components.push_back(c);
  return s;
}

/// Two-region truth from the two-disk phantom: label 1 inside, 0 outside.
inline PCFunction two_disk_truth(const ImageGrid& grid, double delta) {
  const Image f = rasterize_phantom(two_disks_2d(), grid);
  std::vector<int> labels(f.size());
  for (std::size_t i = 0; i < f.size(); ++i) labels[i] = f[i] > 0.5 ? 1 : 0;
  return {Partition(grid, 2, std::move(labels), delta), {0.0, 1.0}};
}

}  // namespace radonms::testing
