#include <doctest.h>

#include <cmath>

#include "radonms/error.hpp"
#include "radonms/ms.hpp"
#include "radonms/noise.hpp"
#include "radonms/radon.hpp"
#include "radonms/spectral.hpp"
#include "support/fixtures.hpp"

using namespace radonms;
using namespace radonms::testing;

namespace {

Partition square(const ImageGrid& grid, int lo, int r) {
  Partition p = Partition::uniform(grid, 2, 0.0);
  for (int y = lo; y < lo + r; ++y)
    for (int x = lo; x < lo + r; ++x) p.set_label(grid.linear_index({x, y, 0}), 1);
  return p;
}

struct Fixture {
  ImageGrid grid = centered_grid(2, 32, 1.0);
  ProjectionGeometry geo = ProjectionGeometry::covering_2d(grid, 45, grid.min_spacing());
  double delta = 4.0 * grid.cell_volume();
  PCFunction truth = two_disk_truth(grid, delta);
  Sinogram g = forward_project(truth.image(), geo);
};

}  // namespace

TEST_SUITE("ms") {
  TEST_CASE("perimeter oracles") {
    const ImageGrid grid = centered_grid(2, 16, 1.0);
    const double h = grid.spacing(0);
    CHECK(discrete_perimeter(Partition::uniform(grid, 1, 0.0))[0] == 0.0);
    const std::vector<double> per = discrete_perimeter(square(grid, 4, 5));
    CHECK(per[1] == doctest::Approx(4 * 5 * h));
    CHECK(per[0] == doctest::Approx(4 * 5 * h));
    CHECK(interface_area(square(grid, 4, 5)) == doctest::Approx(4 * 5 * h));

    std::vector<int> checker(grid.cell_count());
    for (std::size_t i = 0; i < checker.size(); ++i) {
      const Index3 q = grid.multi_index(i);
      checker[i] = (q[0] + q[1]) % 2;
    }
    CHECK(interface_area(Partition(grid, 2, checker, 0.0)) == doctest::Approx(2.0 * 16 * 15 * h));
  }

  TEST_CASE("partition invariants") {
    const ImageGrid grid = centered_grid(2, 8, 1.0);
    CHECK_THROWS_AS(Partition(grid, 2, std::vector<int>(64, 2), 0.0), InvalidArgument);
    CHECK_THROWS_AS(Partition(grid, 2, std::vector<int>(10, 0), 0.0), InvalidArgument);
    const Partition p = square(grid, 2, 2);
    CHECK(p.cell_counts()[1] == 4);
    CHECK(Partition(grid, 2, p.labels(), 4.0 * grid.cell_volume()).admissible());
    CHECK_FALSE(Partition(grid, 2, p.labels(), 5.0 * grid.cell_volume()).admissible());
    MSConfig bad;
    bad.beta = 0.0;
    CHECK_THROWS_AS(bad.validate(), InvalidArgument);
  }

  TEST_CASE("energy of the exact fixture") {
    Fixture fx;
    const EnergyBreakdown e = evaluate_energy(fx.truth, fx.g, 0.5);
    CHECK(e.fidelity < 1e-3 * l2_norm(fx.g) * l2_norm(fx.g));
    CHECK(e.perimeter == doctest::Approx(2.0 * interface_area(fx.truth.partition)));
    CHECK(e.total == doctest::Approx(e.fidelity + 0.5 * e.perimeter));

    const ImageGrid& grid = fx.grid;
    Image one(grid);
    for (double& v : one.values()) v = 1.0;
    const PCFunction flat{Partition::uniform(grid, 1, 0.0), {1.0}};
    CHECK(evaluate_energy(flat, forward_project(one, fx.geo), 1.0).total < 1e-20);
  }

  TEST_CASE("value fit") {
    Fixture fx;
    const std::vector<double> v = fit_values(fx.truth.partition, fx.g, 0.0);
    CHECK(std::abs(v[0]) < 1e-8);
    CHECK(std::abs(v[1] - 1.0) < 1e-8);

    Image one(fx.grid);
    for (double& x : one.values()) x = 3.0;
    const std::vector<double> c = fit_values(Partition::uniform(fx.grid, 1, 0.0), forward_project(one, fx.geo), 0.0);
    CHECK(c[0] == doctest::Approx(3.0).epsilon(1e-10));

    const Partition empty_region = Partition::uniform(fx.grid, 2, 0.0);
    CHECK_THROWS_AS(fit_values(empty_region, fx.g, 0.0), SingularSystemError);
    CHECK_NOTHROW(fit_values(empty_region, fx.g, 1e-8));
  }

  TEST_CASE("single-flip updates") {
    Fixture fx;
    MSConfig cfg;
    cfg.beta = 1e-6;
    SweepStats st;
    CHECK(update_partition(fx.truth, fx.g, cfg, &st) == fx.truth.partition);
    CHECK(st.moves == 0);

    PCFunction off = fx.truth;
    std::size_t cell = 0;
    for (std::size_t i = 0; i < off.partition.labels().size(); ++i) {
      const Index3 q = fx.grid.multi_index(i);
      bool interior = q[0] > 0 && q[1] > 0 && q[0] < 31 && q[1] < 31;
      for (auto d : {Index3{1, 0, 0}, Index3{0, 1, 0}}) {
        if (!interior) break;
        interior = off.partition.label(fx.grid.linear_index({q[0] + d[0], q[1] + d[1], 0})) == 1 &&
                   off.partition.label(fx.grid.linear_index({q[0] - d[0], q[1] - d[1], 0})) == 1;
      }
      if (interior && off.partition.label(i) == 1) {
        cell = i;
        break;
      }
    }
    off.partition.set_label(cell, 0);
    const double before = evaluate_energy(off, fx.g, cfg.beta).total;
    const PCFunction fixed{update_partition(off, fx.g, cfg), off.values};
    CHECK(fixed.partition.label(cell) == 1);
    CHECK(evaluate_energy(fixed, fx.g, cfg.beta).total < before);
  }

  TEST_CASE("exact recovery from thresholded FBP") {
    Fixture fx;
    MSConfig cfg;
    cfg.beta = 1e-6;
    const Partition init = threshold_init(fbp_reconstruct(fx.g, fx.grid, SpectralFilterConfig{}), 2, fx.delta);
    const MSResult r = reconstruct_pc(fx.g, cfg, init);
    CHECK(std::abs(r.best.values[1] - 1.0) < 0.01);
    CHECK(std::abs(r.best.values[0]) < 0.01);
    CHECK(label_distance(r.best.partition, fx.truth.partition) <= 0.01);
    for (std::size_t i = 1; i < r.trace.size(); ++i) CHECK(r.trace[i].total <= r.trace[i - 1].total);

    const MSResult again = reconstruct_pc(fx.g, cfg, init);
    CHECK(again.best.partition == r.best.partition);
    CHECK(again.best.values == r.best.values);
  }

  TEST_CASE("huge beta shrinks interfaces") {
    Fixture fx;
    MSConfig cfg;
    cfg.beta = 1e3;
    const MSResult r = reconstruct_pc(fx.g, cfg, fx.truth.partition);
    CHECK(r.best.partition.admissible());
    CHECK(r.best_energy.perimeter <= r.trace.front().perimeter);
    CHECK(r.best_energy.total <= r.trace.front().total);
  }

  TEST_CASE("stability sequence") {
    Fixture fx;
    MSConfig cfg;
    cfg.beta = 1e-6;
    const StabilityReport st = stability_experiment(fx.g, cfg, fx.truth.partition);
    CHECK(st.values_cauchy);
    CHECK(st.labels_converge);
    CHECK(st.values.size() == st.relative_eps.size());
  }

  TEST_CASE("threshold init orders labels by value") {
    const ImageGrid grid = centered_grid(2, 16, 1.0);
    const Image f = rasterize_phantom(two_disks_2d(3.0), grid);
    const Partition p = threshold_init(f, 2, 4.0 * grid.cell_volume());
    for (std::size_t i = 0; i < f.size(); ++i) CHECK(p.label(i) == (f[i] > 1.0 ? 1 : 0));
  }

  TEST_CASE("trend predicate") {
    CHECK(decreasing_trend({0.3, 0.3, 0.1}));
    CHECK(decreasing_trend({0.0, 0.0}));
    CHECK_FALSE(decreasing_trend({0.3, 0.4, 0.1}));
    CHECK_FALSE(decreasing_trend({0.3, 0.3}));
  }
}
