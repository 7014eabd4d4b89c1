#include <doctest.h>

#include "radonms/noise.hpp"
#include "support/fixtures.hpp"

using namespace radonms;

TEST_SUITE("noise") {
  const ProjectionGeometry geo = ProjectionGeometry::parallel_2d(12, 21, 1.5);

  TEST_CASE("noise has exactly the requested norm") {
    const Sinogram g = testing::random_sinogram(geo, 1);
    const Sinogram ge = add_noise(g, {0.3, 5});
    CHECK(l2_norm(ge - g) == doctest::Approx(0.3).epsilon(1e-12));
    CHECK(l2_norm(unit_noise(geo, 5)) == doctest::Approx(1.0).epsilon(1e-12));
  }

  TEST_CASE("same seed same draw, different seed different draw") {
    const Sinogram a = unit_noise(geo, 9), b = unit_noise(geo, 9), c = unit_noise(geo, 10);
    CHECK(l2_norm(a - b) == 0.0);
    CHECK(l2_norm(a - c) > 0.1);
  }

  TEST_CASE("zero epsilon returns the data") {
    const Sinogram g = testing::random_sinogram(geo, 2);
    CHECK(l2_norm(add_noise(g, {0.0, 1}) - g) == 0.0);
  }
}
