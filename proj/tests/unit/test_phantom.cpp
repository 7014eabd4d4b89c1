#include <doctest.h>

#include <cmath>
#include <numbers>

#include "radonms/error.hpp"
#include "radonms/phantom.hpp"
#include "support/fixtures.hpp"

using namespace radonms;

TEST_SUITE("phantom") {
  TEST_CASE("disk mass converges to its area") {
    const Image f = rasterize_phantom(testing::unit_disk(), centered_grid(2, 256, 1.5));
    CHECK(std::abs(total_mass(f) - std::numbers::pi) < 1e-2);
  }

  TEST_CASE("rotated ellipse keeps its area") {
    PhantomSpec s;
    EllipsoidComponent c;
    c.semi_axes = {0.8, 0.3, 1.0};
    c.angle = 0.7;
    c.value = 2.0;
    s.components.push_back(c);
    const Image f = rasterize_phantom(s, centered_grid(2, 256, 1.0));
    CHECK(std::abs(total_mass(f) - 2.0 * std::numbers::pi * 0.24) < 1e-2);
  }

  TEST_CASE("overlapping components add") {
    PhantomSpec s;
    EllipsoidComponent a, b;
    a.semi_axes = b.semi_axes = {0.5, 0.5, 1.0};
    b.value = -0.25;
    s.components = {a, b};
    const ImageGrid g = centered_grid(2, 16, 1.0);
    const Image f = rasterize_phantom(s, g);
    CHECK(f[g.linear_index({8, 8, 0})] == doctest::Approx(0.75));
    CHECK(f[0] == 0.0);
  }

  TEST_CASE("3D ball volume") {
    const Image f = rasterize_phantom(testing::unit_disk(), centered_grid(3, 64, 1.25));
    CHECK(std::abs(total_mass(f) - 4.0 / 3.0 * std::numbers::pi) < 0.05);
  }

  TEST_CASE("builtin phantoms fit the unit square") {
    const ImageGrid g = centered_grid(2, 64, 1.0);
    const Image sl = rasterize_phantom(shepp_logan_2d(), g);
    CHECK(total_mass(sl) > 0.0);
    const Image td = rasterize_phantom(two_disks_2d(), g);
    for (double v : td.values()) CHECK((v == 0.0 || v == 1.0));
  }

  TEST_CASE("degenerate axes are rejected") {
    PhantomSpec s;
    EllipsoidComponent c;
    c.semi_axes = {0.0, 1.0, 1.0};
    s.components.push_back(c);
    CHECK_THROWS_AS(s.validate(2), InvalidArgument);
  }
}
