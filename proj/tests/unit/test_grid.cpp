#include <doctest.h>

#include <cmath>
#include <limits>

#include "radonms/error.hpp"
#include "radonms/grid.hpp"

using namespace radonms;

TEST_SUITE("grid") {
  TEST_CASE("centered grid covers the requested box") {
    const ImageGrid g = centered_grid(2, 8, 1.0);
    CHECK(g.ndim() == 2);
    CHECK(g.cell_count() == 64);
    CHECK(g.spacing(0) == doctest::Approx(0.25));
    CHECK(g.box_lo()[0] == doctest::Approx(-1.0));
    CHECK(g.box_hi()[1] == doctest::Approx(1.0));
    CHECK(g.cell_volume() == doctest::Approx(0.0625));
    CHECK(g.circumradius() == doctest::Approx(std::sqrt(2.0)));
    CHECK(g.center(std::size_t{0})[0] == doctest::Approx(-0.875));
  }

  TEST_CASE("linear and multi index round trip in 3D") {
    const ImageGrid g = centered_grid(3, 5, 1.0);
    for (std::size_t i = 0; i < g.cell_count(); i += 7) CHECK(g.linear_index(g.multi_index(i)) == i);
    const Index3 idx = g.multi_index(1);
    CHECK(idx[0] == 1);
    CHECK(idx[1] == 0);
  }

  TEST_CASE("padding keeps cell centers aligned") {
    const ImageGrid g = centered_grid(2, 8, 1.0);
    const ImageGrid p = g.padded(3);
    CHECK(p.dim(0) == 14);
    CHECK(p.spacing(0) == g.spacing(0));
    CHECK(p.center(Index3{3, 3, 0})[0] == doctest::Approx(g.center(Index3{0, 0, 0})[0]));
  }

  TEST_CASE("image arithmetic and norms") {
    const ImageGrid g = centered_grid(2, 4, 1.0);
    Image a(g), b(g);
    for (std::size_t i = 0; i < a.size(); ++i) {
      a[i] = 1.0;
      b[i] = 2.0;
    }
    CHECK(total_mass(a) == doctest::Approx(4.0));
    CHECK(inner(a, b) == doctest::Approx(8.0));
    CHECK(l2_norm(a) == doctest::Approx(2.0));
    CHECK(relative_l2_error(b, a) == doctest::Approx(1.0));
    CHECK(l2_norm(b - 2.0 * a) == doctest::Approx(0.0));
  }

  TEST_CASE("mismatched grids and non-finite values are rejected") {
    Image a(centered_grid(2, 4, 1.0)), b(centered_grid(2, 5, 1.0));
    CHECK_THROWS_AS(inner(a, b), GeometryMismatch);
    a[2] = std::numeric_limits<double>::quiet_NaN();
    CHECK_THROWS_AS(a.check_finite(), InvalidArgument);
    CHECK_THROWS_AS(centered_grid(2, 0, 1.0), InvalidArgument);
  }
}
