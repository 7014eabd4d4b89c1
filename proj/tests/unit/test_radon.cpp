#include <doctest.h>

#include <cmath>
#include <numbers>

#include "radonms/error.hpp"
#include "radonms/noise.hpp"
#include "radonms/radon.hpp"
#include "support/fixtures.hpp"

using namespace radonms;
using namespace radonms::testing;

TEST_SUITE("radon") {
  TEST_CASE("zero in, zero out") {
    const ImageGrid grid = centered_grid(2, 16, 1.0);
    const Sinogram g = forward_project(Image(grid), ProjectionGeometry::covering_2d(grid, 10, 0.1));
    for (double v : g.values()) CHECK(v == 0.0);
  }

  TEST_CASE("dense operator reproduces forward_project and its transpose") {
    const ImageGrid grid = centered_grid(2, 8, 1.0);
    const ProjectionGeometry geo = ProjectionGeometry::parallel_2d(12, 16, 1.5);
    const DenseOperator op = build_dense_operator(geo, grid);
    CHECK(op.rows() == 192);
    CHECK(op.cols() == 64);
    const Image f = random_image(grid, 1);
    const Sinogram a = op.apply(f), b = forward_project(f, geo);
    CHECK(l2_norm(a - b) <= 1e-12 * l2_norm(b));
    const Sinogram g = random_sinogram(geo, 2);
    const Image bp = back_project(g, grid);
    CHECK(relative_l2_error(op.apply_transpose_rescaled(g), bp) < 1e-10);
  }

  TEST_CASE("inner-product identity on 32x32") {
    const ImageGrid grid = centered_grid(2, 32, 1.0);
    const ProjectionGeometry geo = ProjectionGeometry::covering_2d(grid, 40, grid.min_spacing());
    const Image f = random_image(grid, 3);
    const Sinogram g = random_sinogram(geo, 4);
    const double lhs = inner(forward_project(f, geo), g);
    const double rhs = adjoint_constant(geo) * inner(f, back_project(g, grid));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs));
    CHECK(adjoint_constant(geo) == doctest::Approx(2.0 * std::numbers::pi));
  }

  TEST_CASE("point back projection is close to the adjoint on smooth data") {
    const ImageGrid grid = centered_grid(2, 32, 2.0);
    const ProjectionGeometry geo = ProjectionGeometry::covering_2d(grid, 40, grid.min_spacing());
    const Image f = gaussian_image(grid, 0.4);
    const Sinogram g = forward_project(gaussian_image(grid, 0.5, 1.0, {0.3, 0.2, 0.0}), geo);
    const double lhs = inner(forward_project(f, geo), g);
    const double rhs = adjoint_constant(geo) * inner(f, back_project(g, grid, BackProjectionMode::point));
    CHECK(std::abs(lhs - rhs) <= 2e-3 * std::abs(lhs));
  }

  TEST_CASE("3D inner-product identity") {
    const ImageGrid grid = centered_grid(3, 8, 1.0);
    const ProjectionGeometry geo = ProjectionGeometry::covering_3d(grid, 30, grid.min_spacing());
    const Image f = random_image(grid, 5);
    const Sinogram g = random_sinogram(geo, 6);
    const double lhs = inner(forward_project(f, geo), g);
    const double rhs = adjoint_constant(geo) * inner(f, back_project(g, grid));
    CHECK(std::abs(lhs - rhs) <= 1e-10 * std::abs(lhs));
  }

  TEST_CASE("back projection of a constant is that constant") {
    const ImageGrid grid = centered_grid(2, 16, 1.0);
    const ProjectionGeometry geo = ProjectionGeometry::covering_2d(grid, 20, grid.min_spacing());
    Sinogram g(geo);
    for (double& v : g.values()) v = 2.5;
    const BackProjection bp = back_project_with_report(g, grid, BackProjectionMode::point);
    CHECK(bp.truncated_samples == 0);
    for (double v : bp.image.values()) CHECK(v == doctest::Approx(2.5).epsilon(1e-12));
  }

  TEST_CASE("back projection of a centered Gaussian sinogram is radial") {
    const ImageGrid grid = centered_grid(2, 64, 2.0);
    const ProjectionGeometry geo = ProjectionGeometry::covering_2d(grid, 90, grid.min_spacing());
    const Image bp = back_project(forward_project(gaussian_image(grid, 0.3), geo), grid);
    double worst = 0.0, peak = 0.0;
    for (int y = 0; y < 64; ++y)
      for (int x = 0; x < 64; ++x) {
        const double v = bp[grid.linear_index({x, y, 0})];
        peak = std::max(peak, v);
        worst = std::max(worst, std::abs(v - bp[grid.linear_index({y, 63 - x, 0})]));
        worst = std::max(worst, std::abs(v - bp[grid.linear_index({63 - x, y, 0})]));
      }
    CHECK(worst < 1e-2 * peak);
  }

  TEST_CASE("mass is conserved along every direction") {
    const ImageGrid grid = centered_grid(2, 64, 1.0);
    const ProjectionGeometry geo = ProjectionGeometry::covering_2d(grid, 33, grid.min_spacing());
    const Image f = rasterize_phantom(shepp_logan_2d(), grid);
    const Sinogram g = forward_project(f, geo);
    for (int j = 0; j < geo.n_directions(); ++j) {
      double m = 0.0;
      for (double v : g.profile(j)) m += v * geo.offset_spacing();
      CHECK(m == doctest::Approx(total_mass(f)).epsilon(1e-3));
    }
  }

  TEST_CASE("range moments") {
    const ImageGrid grid = centered_grid(2, 64, 1.0);
    const ProjectionGeometry geo = ProjectionGeometry::covering_2d(grid, 45, grid.min_spacing());
    const MomentReport r = check_range_moments(forward_project(gaussian_image(grid, 0.2, 1.0, {0.3, -0.1, 0}), geo), 2);
    CHECK(r.fits.at(0).max_relative_deviation < 1e-3);
    CHECK(r.fits.at(1).relative_residual < 1e-2);
    CHECK(r.fits.at(2).relative_residual < 1e-2);
    const MomentReport z = check_range_moments(Sinogram(geo), 2);
    CHECK(z.worst_residual() == 0.0);
    CHECK(check_range_moments(unit_noise(geo, 3), 1).fits.at(1).relative_residual > 0.1);
  }

  TEST_CASE("truncated geometry and oversize matrices are reported") {
    const ImageGrid grid = centered_grid(2, 16, 1.0);
    const ProjectionGeometry small = ProjectionGeometry::parallel_2d(8, 11, 0.5);
    CHECK_FALSE(small.covers(grid));
    CHECK(back_project_with_report(Sinogram(small), grid).truncated_samples > 0);
    CHECK_THROWS_AS(build_dense_operator(ProjectionGeometry::covering_2d(grid, 8, 0.1), grid, 1024), CapacityError);
    CHECK_THROWS_AS(forward_project(Image(centered_grid(3, 4, 1.0)), small), GeometryMismatch);
  }
}
