// Acceptance runner: one PASS/FAIL line per criterion.
//
//   acceptance [AC1 ... AC8] [--cli PATH] [--known-red AC7,...]
//
// Exit status is 0 when the set of failing criteria equals the --known-red
// set, so a documented red stays visible while a new red (or a red turning
// green) breaks the build.

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <numbers>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <unistd.h>

#include "radonms/electrostatics.hpp"
#include "radonms/io.hpp"
#include "radonms/ms.hpp"
#include "radonms/noise.hpp"
#include "radonms/phantom.hpp"
#include "radonms/radon.hpp"
#include "radonms/regularize.hpp"
#include "radonms/spectral.hpp"
#include "support/fixtures.hpp"

#ifndef RADONMS_CLI_PATH
#define RADONMS_CLI_PATH ""
#endif

namespace fs = std::filesystem;
using namespace radonms;
using namespace radonms::testing;

namespace {

struct Outcome {
  bool pass = true;
  std::ostringstream detail;

  void require(bool ok, const std::string& what) {
    if (!ok) pass = false;
    detail << (detail.tellp() > 0 ? "; " : "") << what << (ok ? "" : " [FAIL]");
  }
};

std::string num(double v) {
  std::ostringstream s;
  s.precision(3);
  s << v;
  return s.str();
}

std::string list(const std::vector<double>& v) {
  std::string s = "[";
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? " " : "") + num(v[i]);
  return s + "]";
}

void ac1(Outcome& o) {
  const ImageGrid grid = centered_grid(2, 12, 1.0);
  const ProjectionGeometry geo = ProjectionGeometry::covering_2d(grid, 18, grid.min_spacing());
  const DenseOperator op = build_dense_operator(geo, grid);
  const Sinogram g = random_sinogram(geo, 3);
  const Image f = random_image(grid, 4);

  const Image bp = back_project(g, grid);
  const double matrix_defect = relative_l2_error(op.apply_transpose_rescaled(g), bp);
  const double apply_defect = l2_norm(op.apply(f) - forward_project(f, geo)) / l2_norm(forward_project(f, geo));
  const double lhs = inner(forward_project(f, geo), g);
  const double rhs = adjoint_constant(geo) * inner(f, bp);
  const double inner_defect = std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs));
  o.require(matrix_defect < 1e-10, "matrix transpose defect " + num(matrix_defect) + " < 1e-10");
  o.require(apply_defect < 1e-10, "matrix vs forward_project " + num(apply_defect) + " < 1e-10");
  o.require(inner_defect < 1e-3, "inner-product defect " + num(inner_defect) + " < 1e-3");
}

void ac2(Outcome& o) {
  {
    const ImageGrid grid = centered_grid(2, 256, 2.0);
    const double h = grid.min_spacing();
    const ProjectionGeometry geo = ProjectionGeometry::covering_2d(grid, 8, h);
    const Sinogram g = forward_project(rasterize_phantom(unit_disk(), grid), geo);
    double worst = 0.0, interior = 0.0;
    for (int j = 0; j < geo.n_directions(); ++j)
      for (int i = 0; i < geo.n_offsets(); ++i) {
        const double x = geo.offset(i);
        const double exact = std::abs(x) < 1.0 ? 2.0 * std::sqrt(1.0 - x * x) : 0.0;
        const double err = std::abs(g.at(j, i) - exact);
        worst = std::max(worst, err);
        if (std::abs(x) <= 0.95) interior = std::max(interior, err);
      }
    o.require(worst < 2.0 * h, "disk chord max error " + num(worst) + " < 2h=" + num(2.0 * h));
    o.detail << " (|X|<=0.95: " << num(interior) << ")";
  }
  {
    const ImageGrid grid = centered_grid(2, 256, 5.0);
    const ProjectionGeometry geo = ProjectionGeometry::covering_2d(grid, 8, grid.min_spacing());
    const Sinogram g = forward_project(gaussian_image(grid, std::sqrt(0.5)), geo);
    const double peak = std::sqrt(std::numbers::pi);
    double worst = 0.0;
    for (int j = 0; j < geo.n_directions(); ++j)
      for (int i = 0; i < geo.n_offsets(); ++i) {
        const double x = geo.offset(i);
        worst = std::max(worst, std::abs(g.at(j, i) - peak * std::exp(-x * x)));
      }
    o.require(worst / peak < 1e-3, "gaussian profile max relative error " + num(worst / peak) + " < 1e-3");
  }
}

void ac3(Outcome& o) {
  const SpectralFilterConfig cfg;
  {
    const ImageGrid grid = centered_grid(2, 128, 4.0);
    const Image f = gaussian_image(grid, std::sqrt(0.5));
    const Sinogram g = forward_project(f, ProjectionGeometry::covering_2d(grid, 180, grid.min_spacing()));
    const double post = relative_l2_error(fbp_reconstruct(g, grid, cfg), f);
    const double pre = relative_l2_error(fbp_reconstruct(g, grid, cfg, FbpPath::filter_then_backproject), f);
    o.require(post < 0.03, "gaussian round trip " + num(post) + " < 0.03");
    o.require(pre < 0.03, "gaussian round trip (profile filter) " + num(pre) + " < 0.03");
  }
  {
    const ImageGrid grid = centered_grid(2, 128, 1.0);
    const Image f = rasterize_phantom(two_disks_2d(), grid);
    const Sinogram g = forward_project(f, ProjectionGeometry::covering_2d(grid, 180, grid.min_spacing()));
    const double err = relative_l2_error(fbp_reconstruct(g, grid, cfg), f);
    o.require(err < 0.15, "two-disk round trip " + num(err) + " < 0.15");
  }
}

void ac4(Outcome& o) {
  const ImageGrid grid = centered_grid(2, 128, 1.0);
  const ProjectionGeometry geo = ProjectionGeometry::covering_2d(grid, 90, grid.min_spacing());
  double mass = 0.0, deg1 = 0.0;
  for (const PhantomSpec& spec : {two_disks_2d(), shepp_logan_2d()}) {
    const MomentReport r = check_range_moments(forward_project(rasterize_phantom(spec, grid), geo), 1);
    mass = std::max(mass, r.fits.at(0).max_relative_deviation);
    deg1 = std::max(deg1, r.fits.at(1).relative_residual);
  }
  const MomentReport noise = check_range_moments(unit_noise(geo, 5), 1);
  o.require(mass < 1e-3, "k=0 mass deviation " + num(mass) + " < 1e-3");
  o.require(deg1 < 1e-2, "k=1 fit residual " + num(deg1) + " < 1e-2");
  o.require(noise.fits.at(1).relative_residual > 0.1,
            "white-noise k=1 residual " + num(noise.fits.at(1).relative_residual) + " > 0.1");
}

void ac5(Outcome& o) {
  const ImageGrid grid = centered_grid(2, 16, 1.0);
  const ProjectionGeometry geo = ProjectionGeometry::covering_2d(grid, 24, 2.0 * grid.min_spacing());
  const OperatorSvd svd(build_dense_operator(geo, grid));
  const SpectrumReport rep = analyze_spectrum(svd, {1e-1, 1e-2, 1e-3});
  const int k = rep.decay_index(0.1);
  o.require(k > 0 && k < static_cast<int>(rep.sigma.size()),
            "sigma_k/sigma_1 < 0.1 beyond k=" + std::to_string(k) + " of " + std::to_string(rep.sigma.size()));

  const Image f = rasterize_phantom(two_disks_2d(), grid);
  SweepConfig cfg;
  cfg.method = RegMethod::tikhonov;
  cfg.schedule = {1.0, 1.0};
  const SweepResult good = convergence_sweep(f, svd, cfg);
  cfg.schedule = {1.0, 3.0};
  const SweepResult bad = convergence_sweep(f, svd, cfg);
  std::vector<double> e1, e3;
  for (const SweepRow& r : good.rows) e1.push_back(r.relative_error);
  for (const SweepRow& r : bad.rows) e3.push_back(r.relative_error);
  o.require(good.converging, "gamma=eps errors " + list(e1) + " decrease");
  o.require(!bad.converging, "gamma=eps^3 errors " + list(e3) + " do not converge");
}

void ac6(Outcome& o) {
  for (const ResidualReport& r : run_electro_suite()) {
    std::string what = r.check + "@" + r.resolution + " " + num(r.residual) + " < " + num(r.tolerance);
    if (!r.refinement_trend.empty()) what += " trend " + list(r.refinement_trend);
    o.require(r.passed, what);
  }
}

void ac7(Outcome& o) {
  const ImageGrid grid = centered_grid(2, 64, 1.0);
  const ProjectionGeometry geo = ProjectionGeometry::covering_2d(grid, 90, grid.min_spacing());
  MSConfig cfg;
  cfg.beta = 1e-6;
  const double delta = cfg.delta_for(grid);
  const PCFunction truth = two_disk_truth(grid, delta);
  const Sinogram g = forward_project(truth.image(), geo);
  const Partition init = threshold_init(fbp_reconstruct(g, grid, SpectralFilterConfig{}), 2, delta);

  const MSResult res = reconstruct_pc(g, cfg, init);
  double value_err = 0.0;
  for (int k = 0; k < 2; ++k) value_err = std::max(value_err, std::abs(res.best.values[k] - truth.values[k]));
  const double correct = 1.0 - label_distance(res.best.partition, truth.partition);
  o.require(value_err < 0.01, "exact-recovery value error " + num(value_err) + " < 0.01");
  o.require(correct >= 0.99, "cells correct " + num(correct) + " >= 0.99");

  std::vector<double> totals;
  bool monotone = true;
  auto check_trace = [&](const MSResult& r) {
    for (std::size_t i = 1; i < r.trace.size(); ++i) monotone = monotone && r.trace[i].total <= r.trace[i - 1].total;
  };
  check_trace(res);
  for (double eps : {0.1, 0.01}) {
    const Sinogram ge = add_noise(g, {eps * l2_norm(g), 21});
    check_trace(reconstruct_pc(ge, cfg, init));
  }
  o.require(monotone, "energy traces monotone");

  const StabilityReport st = stability_experiment(g, cfg, init);
  o.require(st.values_cauchy, "stability value steps " + list(st.value_steps) + " decrease");
  o.require(st.labels_converge, "stability label distances " + list(st.label_distances) + " decrease");

  RegularizationConfig rc;
  rc.schedule = {1.0, 1.0};
  const RegularizationReport lin = regularization_experiment(truth, geo, cfg, rc);
  rc.schedule = {1.0, 2.0};
  const RegularizationReport quad = regularization_experiment(truth, geo, cfg, rc);
  std::vector<double> e1, e2;
  for (const RegularizationRow& r : lin.rows) e1.push_back(r.error);
  for (const RegularizationRow& r : quad.rows) e2.push_back(r.error);
  o.require(lin.converging, "beta=eps errors " + list(e1) + " decrease");
  o.require(!quad.converging, "beta=eps^2 errors " + list(e2) + " stagnate");
}

std::map<std::string, std::string> snapshot(const fs::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file()) files[e.path().filename().string()] = read_file(e.path());
  return files;
}

void ac8(Outcome& o, const std::string& cli) {
  if (cli.empty() || !fs::exists(cli)) {
    o.require(false, "CLI binary not found: '" + cli + "'");
    return;
  }
  const fs::path root = fs::temp_directory_path() / ("radonms_ac8_" + std::to_string(::getpid()));
  const std::vector<std::string> steps = {
      "phantom --spec two_disks --grid 48 --out f.csv",
      "project --in f.csv --angles 60 --out g.csv",
      "noise --in g.csv --epsilon 0.02 --relative --seed 9 --out ge.csv",
      "fbp --in ge.csv --like f.csv --out fbp.csv",
      "mspc --in ge.csv --like f.csv --beta 1e-4 --seed 4 --out ms.csv",
      "spectrum --grid 8 --angles 12 --out sp",
      "sweep --grid 8 --angles 12 --trials 2 --seed 5 --out sweep.csv",
  };
  std::map<std::string, std::string> runs[2];
  const char* threads[2] = {"1", "4"};
  for (int run = 0; run < 2; ++run) {
    const fs::path dir = root / std::to_string(run);
    fs::create_directories(dir);
    for (const std::string& s : steps) {
      const std::string cmd = "cd '" + dir.string() + "' && '" + cli + "' --threads " + threads[run] + " " + s +
                              " > /dev/null 2>> cli.log";
      if (std::system(cmd.c_str()) != 0) {
        o.require(false, "command failed: " + s);
        fs::remove_all(root);
        return;
      }
    }
    fs::remove(dir / "cli.log");
    runs[run] = snapshot(dir);
  }
  fs::remove_all(root);
  std::size_t differing = 0;
  for (const auto& [name, bytes] : runs[0]) {
    auto it = runs[1].find(name);
    if (it == runs[1].end() || it->second != bytes) ++differing;
  }
  o.require(runs[0].size() == runs[1].size() && differing == 0,
            std::to_string(runs[0].size()) + " artifacts from " + std::to_string(steps.size()) +
                " commands, " + std::to_string(differing) + " differ between runs (1 vs 4 threads)");
}

}  // namespace

int main(int argc, char** argv) {
  std::string cli = RADONMS_CLI_PATH;
  std::set<std::string> selected, known_red;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--cli" && i + 1 < argc) {
      cli = argv[++i];
    } else if (a == "--known-red" && i + 1 < argc) {
      std::stringstream ss(argv[++i]);
      for (std::string t; std::getline(ss, t, ',');) known_red.insert(t);
    } else {
      selected.insert(a);
    }
  }

  const std::vector<std::pair<std::string, std::function<void(Outcome&)>>> criteria = {
      {"AC1", ac1}, {"AC2", ac2}, {"AC3", ac3}, {"AC4", ac4}, {"AC5", ac5}, {"AC6", ac6}, {"AC7", ac7},
      {"AC8", [&](Outcome& o) { ac8(o, cli); }},
  };

  std::set<std::string> failed;
  for (const auto& [name, run] : criteria) {
    if (!selected.empty() && !selected.count(name)) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      run(o);
    } catch (const std::exception& e) {
      o.require(false, std::string("exception: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (!o.pass) failed.insert(name);
    std::cout << name << " " << (o.pass ? "PASS" : "FAIL") << " (" << num(secs) << " s) " << o.detail.str()
              << std::endl;
  }

  std::set<std::string> expected;
  for (const std::string& k : known_red)
    if (selected.empty() || selected.count(k)) expected.insert(k);
  if (failed != expected) {
    for (const std::string& k : expected)
      if (!failed.count(k)) std::cout << k << " listed as known red but passed" << std::endl;
    return 1;
  }
  return 0;
}
