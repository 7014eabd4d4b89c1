#include "radonms/noise.hpp"

#include <cmath>
#include <random>

#include "radonms/error.hpp"

namespace radonms {

Sinogram unit_noise(const ProjectionGeometry& geometry, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  Sinogram e(geometry);
  for (double& v : e.values()) v = normal(rng);
  e *= 1.0 / l2_norm(e);
  return e;
}

Sinogram add_noise(const Sinogram& g, const NoiseConfig& cfg) {
  if (!(cfg.epsilon >= 0.0) || !std::isfinite(cfg.epsilon))
    throw InvalidArgument("noise epsilon must be a finite nonnegative number");
  if (cfg.epsilon == 0.0) return g;
  Sinogram e = unit_noise(g.geometry(), cfg.seed);
  e *= cfg.epsilon;
  return g + e;
}

}  // namespace radonms
