#pragma once

#include <cstdint>

#include "radonms/geometry.hpp"

namespace radonms {

struct NoiseConfig {
  /// Target L^2(P^N) distance between the noisy and the clean sinogram.
  double epsilon = 0.0;
  std::uint64_t seed = 0;
};

/// g + e, where e is i.i.d. Gaussian on the stored quotient samples (so the
/// even symmetry of g is kept) rescaled so that l2_norm(e) == epsilon.
/// Deterministic for a given seed within one build.
Sinogram add_noise(const Sinogram& g, const NoiseConfig& cfg);

/// The unit-norm perturbation direction add_noise uses for `seed`.
Sinogram unit_noise(const ProjectionGeometry& geometry, std::uint64_t seed);

}  // namespace radonms
