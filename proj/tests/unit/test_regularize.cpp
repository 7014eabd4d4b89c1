#include <doctest.h>

#include <cmath>

#include <Eigen/Dense>

#include "radonms/radon.hpp"
#include "radonms/regularize.hpp"
#include "support/fixtures.hpp"

using namespace radonms;
using namespace radonms::testing;

namespace {

struct Fixture {
  ImageGrid grid = centered_grid(2, 10, 1.0);
  ProjectionGeometry geo = ProjectionGeometry::covering_2d(grid, 14, grid.min_spacing());
  OperatorSvd svd{build_dense_operator(geo, grid)};
};

}  // namespace

TEST_SUITE("regularize") {
  TEST_CASE("method names round trip") {
    for (RegMethod m : {RegMethod::truncated_svd, RegMethod::tikhonov, RegMethod::band_limited_fbp})
      CHECK(parse_reg_method(to_string(m)) == m);
    CHECK(parse_reg_method("tsvd") == RegMethod::truncated_svd);
    CHECK_THROWS(parse_reg_method("lasso"));
  }

  TEST_CASE("svd reproduces the weighted matrix") {
    Fixture fx;
    const Eigen::MatrixXd a = fx.svd.op().weighted_matrix();
    const Eigen::MatrixXd r = fx.svd.u() * fx.svd.sigma().asDiagonal() * fx.svd.v().transpose();
    CHECK((a - r).norm() < 1e-10 * a.norm());
    CHECK(fx.svd.numerical_rank() == fx.grid.cell_count());
  }

  TEST_CASE("norms grow as gamma shrinks") {
    Fixture fx;
    const SpectrumReport rep = analyze_spectrum(fx.svd, {1e-1, 1e-2, 1e-3, 1e-4});
    for (std::size_t i = 1; i < rep.gammas.size(); ++i) {
      CHECK(rep.tikhonov_norms[i] > rep.tikhonov_norms[i - 1]);
      CHECK(rep.tsvd_norms[i] >= rep.tsvd_norms[i - 1]);
    }
    const Eigen::VectorXd& s = fx.svd.sigma();
    CHECK(regularizer_norm({RegMethod::truncated_svd, 2.0}, s) == doctest::Approx(1.0 / s[0]));
  }

  TEST_CASE("large gamma truncated SVD is the rank-one approximation") {
    Fixture fx;
    const Sinogram g = forward_project(rasterize_phantom(two_disks_2d(), fx.grid), fx.geo);
    const Eigen::VectorXd phi = filter_factors({RegMethod::truncated_svd, 10.0}, fx.svd.sigma());
    CHECK(phi[0] == doctest::Approx(1.0 / fx.svd.sigma()[0]));
    for (Eigen::Index k = 1; k < phi.size(); ++k) CHECK(phi[k] == 0.0);
    const Image r = apply_regularizer({RegMethod::truncated_svd, 10.0}, g, fx.grid, &fx.svd);
    Eigen::Map<const Eigen::VectorXd> rv(r.values().data(), static_cast<Eigen::Index>(r.size()));
    const Eigen::VectorXd v0 = fx.svd.v().col(0);
    CHECK((rv - rv.dot(v0) * v0).norm() < 1e-10 * rv.norm());
  }

  TEST_CASE("Tikhonov matches the regularized normal equations") {
    Fixture fx;
    const Image f = random_image(fx.grid, 2);
    const Sinogram g = forward_project(f, fx.geo);
    const double gamma = 1e-3;
    const Image r = apply_regularizer({RegMethod::tikhonov, gamma}, g, fx.grid, &fx.svd);

    const Eigen::MatrixXd a = fx.svd.op().weighted_matrix();
    const double s1 = fx.svd.sigma()[0];
    const Eigen::VectorXd gw = fx.svd.op().row_sqrt_measure().cwiseProduct(
        Eigen::Map<const Eigen::VectorXd>(g.values().data(), static_cast<Eigen::Index>(g.size())));
    const Eigen::MatrixXd n = a.transpose() * a + gamma * s1 * s1 * Eigen::MatrixXd::Identity(a.cols(), a.cols());
    const Eigen::VectorXd xw = n.ldlt().solve(a.transpose() * gw);
    const Eigen::VectorXd x = xw / std::sqrt(fx.grid.cell_volume());
    Eigen::Map<const Eigen::VectorXd> rv(r.values().data(), static_cast<Eigen::Index>(r.size()));
    CHECK((rv - x).norm() < 1e-8 * x.norm());
  }

  TEST_CASE("band-limited FBP regularizer") {
    Fixture fx;
    const Image f = gaussian_image(fx.grid, 0.35);
    const Image r = apply_regularizer({RegMethod::band_limited_fbp, 0.1}, forward_project(f, fx.geo), fx.grid);
    CHECK(relative_l2_error(r, f) < 0.2);
    CHECK(fbp_operator_norm(fx.geo, fx.grid, 0.01) > fbp_operator_norm(fx.geo, fx.grid, 1.0));
  }

  TEST_CASE("noiseless sweep error is the bias term") {
    Fixture fx;
    SweepConfig cfg;
    cfg.relative_eps = {0.0};
    cfg.schedule = {1e-3, 0.0};
    const SweepResult res = convergence_sweep(rasterize_phantom(two_disks_2d(), fx.grid), fx.svd, cfg);
    REQUIRE(res.rows.size() == 1);
    CHECK(res.rows[0].error == doctest::Approx(res.rows[0].bias_term).epsilon(1e-10));
    CHECK(res.rows[0].noise_term == 0.0);
  }

  TEST_CASE("error stays below the bound sum") {
    Fixture fx;
    SweepConfig cfg;
    cfg.method = RegMethod::truncated_svd;
    const SweepResult res = convergence_sweep(rasterize_phantom(two_disks_2d(), fx.grid), fx.svd, cfg);
    for (const SweepRow& r : res.rows) CHECK(r.within_bound);
    MESSAGE(res.premise_note);
  }

  TEST_CASE("convergence predicate") {
    CHECK(is_converging({1.0, 0.8, 0.5}));
    CHECK_FALSE(is_converging({1.0, 0.8, 0.9}));
    CHECK_FALSE(is_converging({1.0, 0.99, 0.98}));
  }

  TEST_CASE("gamma schedule") {
    const GammaSchedule s{2.0, 3.0};
    CHECK(s(0.1) == doctest::Approx(2e-3));
  }
}
