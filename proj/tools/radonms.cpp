// radonms: phantoms, projection, noise, reconstruction and verification runs.
//
// Exit codes: 0 ok, 1 runtime fault, 2 config or parse error, 3 a numerical
// verification failed.

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "radonms/electrostatics.hpp"
#include "radonms/error.hpp"
#include "radonms/io.hpp"
#include "radonms/ms.hpp"
#include "radonms/noise.hpp"
#include "radonms/parallel.hpp"
#include "radonms/phantom.hpp"
#include "radonms/radon.hpp"
#include "radonms/regularize.hpp"
#include "radonms/spectral.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace radonms;

namespace {

struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};
struct VerificationFailure : std::runtime_error {
  using std::runtime_error::runtime_error;
};

fs::path with_suffix(const fs::path& p, const std::string& tail) {
  return p.parent_path() / (p.stem().string() + tail);
}

void write_image(const fs::path& out, const Image& f, json& outputs) {
  atomic_write(out, image_to_csv(f));
  const fs::path pgm = with_suffix(out, ".pgm");
  atomic_write(pgm, image_to_pgm(f));
  outputs.push_back(out.string());
  outputs.push_back(pgm.string());
}

void write_sinogram(const fs::path& out, const Sinogram& g, json& outputs) {
  atomic_write(out, sinogram_to_csv(g));
  const fs::path pgm = with_suffix(out, ".pgm");
  atomic_write(pgm, sinogram_to_pgm(g));
  outputs.push_back(out.string());
  outputs.push_back(pgm.string());
}

Image load_image(const fs::path& p) { return image_from_csv(read_file(p)); }

Sinogram load_sinogram(const fs::path& p) {
  return sinogram_from_csv(read_file(p), p.has_parent_path() ? p.parent_path() : fs::path("."));
}

std::vector<double> parse_doubles(const std::string& s, const char* what) {
  std::vector<double> out;
  std::string cur;
  auto flush = [&] {
    if (cur.empty()) return;
    try {
      std::size_t used = 0;
      out.push_back(std::stod(cur, &used));
      if (used != cur.size()) throw std::invalid_argument(cur);
    } catch (const std::exception&) {
      throw ConfigError(std::string(what) + ": not a number list: '" + s + "'");
    }
    cur.clear();
  };
  for (char c : s) {
    if (c == ',' || c == ' ' || c == '[' || c == ']') flush();
    else cur.push_back(c);
  }
  flush();
  if (out.empty()) throw ConfigError(std::string(what) + " is empty");
  return out;
}

Window parse_window(const std::string& s) {
  if (s == "none") return Window::none;
  if (s == "cosine") return Window::cosine;
  throw ConfigError("window must be 'none' or 'cosine'");
}

FbpPath parse_path(const std::string& s) {
  if (s == "post" || s == "backproject_then_filter") return FbpPath::backproject_then_filter;
  if (s == "pre" || s == "filter_then_backproject") return FbpPath::filter_then_backproject;
  throw ConfigError("path must be 'post' or 'pre'");
}

PhantomSpec load_phantom(const std::string& spec) {
  if (spec == "two_disks") return two_disks_2d();
  if (spec == "shepp_logan") return shepp_logan_2d();
  return phantom_from_json(read_file(spec));
}

int phantom_ndim(const std::string& spec) {
  if (spec == "two_disks" || spec == "shepp_logan") return 2;
  const json j = json::parse(read_file(spec));
  const json& list = j.is_object() && j.contains("components") ? j.at("components") : j;
  if (!list.is_array() || list.empty()) return 2;
  return static_cast<int>(list.at(0).at("center").size());
}

// Grid for reconstructions: --like / --compare image, else n and half width,
// else the largest square grid inscribed in the offset range.
ImageGrid target_grid(const std::string& like, int n, double half_width, const ProjectionGeometry& geo) {
  if (!like.empty()) return load_image(like).grid();
  const int nd = geo.ndim();
  if (half_width <= 0.0) half_width = geo.x_max() / std::sqrt(static_cast<double>(nd));
  if (n <= 0) n = std::max(2, static_cast<int>(std::floor(2.0 * half_width / geo.offset_spacing())));
  return centered_grid(nd, n, half_width);
}

std::uint64_t env_seed(std::uint64_t fallback) {
  if (const char* s = std::getenv("RADONMS_SEED")) {
    try {
      return std::stoull(s);
    } catch (const std::exception&) {
      throw ConfigError("RADONMS_SEED is not an unsigned integer");
    }
  }
  return fallback;
}

std::string value_string(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_array()) {
    std::string s;
    for (const json& e : v) s += (s.empty() ? "" : ",") + value_string(e);
    return s;
  }
  return v.dump();
}

// JSON config values become option defaults, so command-line flags win.
void apply_config(CLI::App& app, int argc, char** argv) {
  std::string path;
  CLI::App* sub = nullptr;
  for (int i = 1; i < argc; ++i) {
    const std::string a = argv[i];
    if (a == "--config" && i + 1 < argc) path = argv[i + 1];
    else if (a.rfind("--config=", 0) == 0) path = a.substr(9);
    else if (!sub && a[0] != '-') {
      for (CLI::App* s : app.get_subcommands({}))
        if (s->get_name() == a) sub = s;
    }
  }
  if (path.empty()) return;
  json cfg;
  try {
    cfg = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw ConfigError("config " + path + ": " + e.what());
  }
  if (!cfg.is_object()) throw ConfigError("config " + path + " must be a JSON object");
  if (sub && cfg.contains(sub->get_name()) && cfg.at(sub->get_name()).is_object())
    cfg = cfg.at(sub->get_name());
  for (const auto& [key, val] : cfg.items()) {
    if (app.get_subcommand_no_throw(key)) continue;
    CLI::Option* opt = sub ? sub->get_option_no_throw("--" + key) : nullptr;
    if (!opt) opt = app.get_option_no_throw("--" + key);
    if (!opt) throw ConfigError("config " + path + ": unknown key '" + key + "'");
    opt->default_val(value_string(val));
  }
}

void need(const std::string& value, const char* flag) {
  if (value.empty()) throw ConfigError(std::string(flag) + " is required");
}

void print_summary(const json& j) { std::cout << j.dump() << std::endl; }

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"radonms: Radon transform, inversion and piecewise-constant reconstruction"};
  app.require_subcommand(1);
  app.fallthrough();
  std::string config_path;
  int threads = -1;
  app.add_option("--config", config_path, "JSON config; flags override its values");
  app.add_option("--threads", threads, "Worker threads (0 = hardware; env RADONMS_THREADS)");

  // phantom
  struct {
    std::string spec = "two_disks", out;
    int grid = 128;
    double half_width = 1.0;
  } ph;
  auto* c_ph = app.add_subcommand("phantom", "Rasterize a phantom spec onto a grid");
  c_ph->add_option("--spec", ph.spec, "Phantom JSON, or two_disks / shepp_logan");
  c_ph->add_option("--grid", ph.grid, "Cells per axis")->check(CLI::PositiveNumber);
  c_ph->add_option("--half-width", ph.half_width, "Grid covers [-L, L]^N");
  c_ph->add_option("--out", ph.out, "Image CSV (required)");

  // project
  struct {
    std::string in, out, geometry;
    int angles = 180, directions = 256;
    double offset_step = 1.0;
  } pr;
  auto* c_pr = app.add_subcommand("project", "Forward Radon transform of an image");
  c_pr->add_option("--in", pr.in, "Image CSV (required)");
  c_pr->add_option("--out", pr.out, "Sinogram CSV (required)");
  c_pr->add_option("--angles", pr.angles, "2D angles in [0, pi)");
  c_pr->add_option("--directions", pr.directions, "3D hemisphere directions");
  c_pr->add_option("--offset-step", pr.offset_step, "Offset spacing in cell spacings");
  c_pr->add_option("--geometry", pr.geometry, "Geometry JSON (overrides angles/directions)");

  // noise
  struct {
    std::string in, out;
    double epsilon = 0.0;
    bool relative = false;
    std::optional<std::uint64_t> seed;
  } no;
  auto* c_no = app.add_subcommand("noise", "Add Gaussian noise of exact L2 size epsilon");
  c_no->add_option("--in", no.in, "Sinogram CSV (required)");
  c_no->add_option("--out", no.out, "Sinogram CSV (required)");
  c_no->add_option("--epsilon", no.epsilon, "Noise norm")->check(CLI::NonNegativeNumber);
  c_no->add_flag("--relative", no.relative, "epsilon is relative to ||g||");
  c_no->add_option("--seed", no.seed, "RNG seed (env RADONMS_SEED)");

  // fbp
  struct {
    std::string in, out, like, compare, window = "cosine", path = "post";
    int grid = 0;
    double half_width = 0.0, band = 0.9, pad = 0.5;
  } fb;
  auto* c_fb = app.add_subcommand("fbp", "Filtered back-projection");
  c_fb->add_option("--in", fb.in, "Sinogram CSV (required)");
  c_fb->add_option("--out", fb.out, "Image CSV (required)");
  c_fb->add_option("--like", fb.like, "Take the grid from this image CSV");
  c_fb->add_option("--compare", fb.compare, "Reference image CSV; reports relative_l2_error");
  c_fb->add_option("--grid", fb.grid, "Cells per axis");
  c_fb->add_option("--half-width", fb.half_width, "Grid covers [-L, L]^N");
  c_fb->add_option("--band", fb.band, "Band as a fraction of Nyquist");
  c_fb->add_option("--window", fb.window, "none or cosine");
  c_fb->add_option("--pad", fb.pad, "Zero margin fraction");
  c_fb->add_option("--path", fb.path, "post (filter the back-projection) or pre (filter profiles)");

  // mspc
  struct {
    std::string in, out, like, compare, init;
    int grid = 0, m = 2, iters = 50;
    double half_width = 0.0, beta = 1e-6;
    std::optional<double> delta, ridge;
    std::optional<std::uint64_t> seed;
  } ms;
  auto* c_ms = app.add_subcommand("mspc", "Piecewise-constant Mumford-Shah reconstruction");
  c_ms->add_option("--in", ms.in, "Sinogram CSV (required)");
  c_ms->add_option("--out", ms.out, "Image CSV; labels, energy trace and report use its stem");
  c_ms->add_option("--like", ms.like, "Take the grid from this image CSV");
  c_ms->add_option("--compare", ms.compare, "Reference image CSV");
  c_ms->add_option("--grid", ms.grid, "Cells per axis");
  c_ms->add_option("--half-width", ms.half_width, "Grid covers [-L, L]^N");
  c_ms->add_option("--init", ms.init, "Initial label CSV (default: thresholded FBP)");
  c_ms->add_option("--m", ms.m, "Region count")->check(CLI::PositiveNumber);
  c_ms->add_option("--beta", ms.beta, "Perimeter weight")->check(CLI::PositiveNumber);
  c_ms->add_option("--delta", ms.delta, "Region measure floor (default 4 cells)");
  c_ms->add_option("--ridge", ms.ridge, "Value-solve ridge (default 1e-10 trace(G)/m)");
  c_ms->add_option("--iters", ms.iters, "Max outer iterations")->check(CLI::PositiveNumber);
  c_ms->add_option("--seed", ms.seed, "Sweep-order seed (env RADONMS_SEED)");

  // verify-electro
  struct {
    std::string out;
    bool quick = false;
  } ve;
  auto* c_ve = app.add_subcommand("verify-electro", "3D electrostatic identity suite");
  c_ve->add_option("--out", ve.out, "JSON-lines report");
  c_ve->add_flag("--quick", ve.quick, "Coarse levels (smoke run; tolerances may fail)");

  // verify-range
  struct {
    std::string in;
    int kmax = 2;
    double tol = 1e-2, mass_tol = 1e-3;
  } vr;
  auto* c_vr = app.add_subcommand("verify-range", "Moment (range) conditions of a sinogram");
  c_vr->add_option("--in", vr.in, "Sinogram CSV (required)");
  c_vr->add_option("--kmax", vr.kmax, "Highest moment degree")->check(CLI::NonNegativeNumber);
  c_vr->add_option("--tol", vr.tol, "Residual tolerance for the polynomial fits");
  c_vr->add_option("--mass-tol", vr.mass_tol, "Tolerance of the k=0 max relative deviation");

  // spectrum
  struct {
    std::string out = "spectrum", gammas = "0.1,0.01,0.001,0.0001";
    int grid = 16, angles = 24;
    double half_width = 1.0, offset_step = 1.0;
    bool band_limited = false;
  } sp;
  auto* c_sp = app.add_subcommand("spectrum", "SVD of the dense operator and regularizer norms");
  c_sp->add_option("--out", sp.out, "Output prefix (<prefix>_sigma.csv, <prefix>_norms.csv)");
  c_sp->add_option("--grid", sp.grid, "Cells per axis (2D)");
  c_sp->add_option("--half-width", sp.half_width, "Grid covers [-L, L]^2");
  c_sp->add_option("--angles", sp.angles, "Angles in [0, pi)");
  c_sp->add_option("--offset-step", sp.offset_step, "Offset spacing in cell spacings");
  c_sp->add_option("--gammas", sp.gammas, "Comma-separated gamma grid");
  c_sp->add_flag("--band-limited", sp.band_limited, "Also compute band-limited FBP norms");

  // sweep
  struct {
    std::string out = "sweep.csv", method = "tikhonov", eps = "0.2,0.1,0.05,0.025",
                phantom = "two_disks", expect = "any";
    int grid = 16, angles = 24, trials = 4;
    double half_width = 1.0, offset_step = 2.0, coef = 1.0, power = 1.0;
    std::optional<std::uint64_t> seed;
  } sw;
  auto* c_sw = app.add_subcommand("sweep", "Regularization convergence sweep gamma(eps) = coef eps^power");
  c_sw->add_option("--out", sw.out, "Table CSV");
  c_sw->add_option("--method", sw.method, "truncated-svd, tikhonov or band-limited-fbp");
  c_sw->add_option("--eps", sw.eps, "Relative noise levels");
  c_sw->add_option("--coef", sw.coef, "Schedule coefficient");
  c_sw->add_option("--power", sw.power, "Schedule power");
  c_sw->add_option("--phantom", sw.phantom, "Phantom JSON, or two_disks / shepp_logan");
  c_sw->add_option("--grid", sw.grid, "Cells per axis (2D)");
  c_sw->add_option("--half-width", sw.half_width, "Grid covers [-L, L]^2");
  c_sw->add_option("--angles", sw.angles, "Angles in [0, pi)");
  c_sw->add_option("--offset-step", sw.offset_step, "Offset spacing in cell spacings");
  c_sw->add_option("--trials", sw.trials, "Noise draws per level");
  c_sw->add_option("--seed", sw.seed, "Noise seed (env RADONMS_SEED)");
  c_sw->add_option("--expect", sw.expect, "converge, diverge or any; mismatch exits 3");

  try {
    apply_config(app, argc, argv);
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  }

  try {
    if (threads < 0) {
      if (const char* t = std::getenv("RADONMS_THREADS")) {
        try {
          threads = std::stoi(t);
        } catch (const std::exception&) {
          throw ConfigError("RADONMS_THREADS is not an integer");
        }
      }
    }
    if (threads >= 0) set_thread_count(static_cast<unsigned>(threads));

    json summary;
    json outputs = json::array();

    if (*c_ph) {
      need(ph.out, "--out");
      const PhantomSpec spec = load_phantom(ph.spec);
      const int nd = phantom_ndim(ph.spec);
      const Image f = rasterize_phantom(spec, centered_grid(nd, ph.grid, ph.half_width));
      write_image(ph.out, f, outputs);
      summary = {{"command", "phantom"}, {"cells", f.size()}, {"mass", total_mass(f)}};
    } else if (*c_pr) {
      need(pr.in, "--in");
      need(pr.out, "--out");
      const Image f = load_image(pr.in);
      const ImageGrid& grid = f.grid();
      const ProjectionGeometry geo =
          !pr.geometry.empty() ? geometry_from_json(read_file(pr.geometry))
          : grid.ndim() == 2 ? ProjectionGeometry::covering_2d(grid, pr.angles, pr.offset_step * grid.min_spacing())
                             : ProjectionGeometry::covering_3d(grid, pr.directions, pr.offset_step * grid.min_spacing());
      const Sinogram g = forward_project(f, geo);
      write_sinogram(pr.out, g, outputs);
      const MomentReport mr = check_range_moments(g, 0);
      summary = {{"command", "project"},
                 {"directions", geo.n_directions()},
                 {"offsets", geo.n_offsets()},
                 {"mass_deviation", mr.fits.at(0).max_relative_deviation}};
    } else if (*c_no) {
      need(no.in, "--in");
      need(no.out, "--out");
      const Sinogram g = load_sinogram(no.in);
      const std::uint64_t seed = no.seed ? *no.seed : env_seed(0);
      const double eps = no.relative ? no.epsilon * l2_norm(g) : no.epsilon;
      const Sinogram ge = add_noise(g, {eps, seed});
      write_sinogram(no.out, ge, outputs);
      summary = {{"command", "noise"}, {"epsilon", eps}, {"seed", seed},
                 {"relative_epsilon", l2_norm(g) > 0.0 ? eps / l2_norm(g) : 0.0}};
    } else if (*c_fb) {
      need(fb.in, "--in");
      need(fb.out, "--out");
      const Sinogram g = load_sinogram(fb.in);
      const ImageGrid grid =
          target_grid(!fb.like.empty() ? fb.like : fb.compare, fb.grid, fb.half_width, g.geometry());
      SpectralFilterConfig cfg;
      cfg.band_fraction = fb.band;
      cfg.window = parse_window(fb.window);
      cfg.pad_fraction = fb.pad;
      const Image rec = fbp_reconstruct(g, grid, cfg, parse_path(fb.path));
      write_image(fb.out, rec, outputs);
      summary = {{"command", "fbp"}, {"cells", rec.size()}};
      if (!fb.compare.empty()) summary["relative_l2_error"] = relative_l2_error(rec, load_image(fb.compare));
    } else if (*c_ms) {
      need(ms.in, "--in");
      need(ms.out, "--out");
      const Sinogram g = load_sinogram(ms.in);
      const ImageGrid grid =
          target_grid(!ms.like.empty() ? ms.like : ms.compare, ms.grid, ms.half_width, g.geometry());
      MSConfig cfg;
      cfg.beta = ms.beta;
      cfg.m = ms.m;
      cfg.delta = ms.delta;
      cfg.ridge = ms.ridge;
      cfg.max_outer_iters = ms.iters;
      cfg.sweep_seed = ms.seed ? *ms.seed : env_seed(0);
      cfg.validate();
      const double delta = cfg.delta_for(grid);
      const Partition init =
          ms.init.empty() ? threshold_init(fbp_reconstruct(g, grid, SpectralFilterConfig{}), ms.m, delta)
                          : partition_from_csv(read_file(ms.init), ms.m, delta);
      if (!(init.grid() == grid)) throw ConfigError("--init labels are on a different grid");
      const MSResult res = reconstruct_pc(g, cfg, init);
      const Image rec = res.best.image();
      write_image(ms.out, rec, outputs);
      const fs::path out = ms.out;
      const fs::path labels = with_suffix(out, "_labels.csv"), labels_pgm = with_suffix(out, "_labels.pgm");
      const fs::path trace = with_suffix(out, "_energy.csv"), report = with_suffix(out, "_report.json");
      atomic_write(labels, partition_to_csv(res.best.partition));
      atomic_write(labels_pgm, partition_to_pgm(res.best.partition));
      atomic_write(trace, energy_trace_csv(res.trace));
      const json rep = {{"values", res.best.values},
                        {"fidelity", res.best_energy.fidelity},
                        {"perimeter", res.best_energy.perimeter},
                        {"total", res.best_energy.total},
                        {"iterations", res.iterations},
                        {"converged", res.converged},
                        {"beta", cfg.beta},
                        {"delta", delta},
                        {"sweep_seed", cfg.sweep_seed}};
      atomic_write(report, rep.dump(2) + "\n");
      for (const fs::path& p : {labels, labels_pgm, trace, report}) outputs.push_back(p.string());
      summary = {{"command", "mspc"}, {"values", res.best.values}, {"total_energy", res.best_energy.total},
                 {"iterations", res.iterations}, {"converged", res.converged}};
      if (!ms.compare.empty()) summary["relative_l2_error"] = relative_l2_error(rec, load_image(ms.compare));
    } else if (*c_ve) {
      ElectroSuiteConfig cfg;
      if (ve.quick) {
        cfg.levels = {{12, 96}, {16, 128}, {20, 160}};
        cfg.divergence_levels = {16, 20, 24};
      }
      const std::vector<ResidualReport> reps = run_electro_suite(cfg);
      std::string lines;
      json checks = json::array();
      bool ok = true;
      for (const ResidualReport& r : reps) {
        lines += residual_report_json(r) + "\n";
        checks.push_back({{"check", r.check}, {"residual", r.residual}, {"passed", r.passed}});
        ok = ok && r.passed;
      }
      if (!ve.out.empty()) {
        atomic_write(ve.out, lines);
        outputs.push_back(ve.out);
      }
      summary = {{"command", "verify-electro"}, {"checks", checks}, {"passed", ok}};
      if (!ok) {
        summary["outputs"] = outputs;
        print_summary(summary);
        std::string failed;
        for (const ResidualReport& r : reps)
          if (!r.passed) failed += (failed.empty() ? "" : ", ") + r.check;
        throw VerificationFailure("electrostatics checks failed: " + failed);
      }
    } else if (*c_vr) {
      need(vr.in, "--in");
      const Sinogram g = load_sinogram(vr.in);
      const MomentReport mr = check_range_moments(g, vr.kmax);
      json fits = json::array();
      std::string failed;
      for (const MomentFit& f : mr.fits) {
        json j = {{"k", f.degree}, {"residual", f.relative_residual}, {"underdetermined", f.underdetermined}};
        if (f.degree == 0) j["max_relative_deviation"] = f.max_relative_deviation;
        fits.push_back(j);
        if (f.underdetermined) continue;
        const bool bad = f.degree == 0 ? !(f.max_relative_deviation < vr.mass_tol) : !(f.relative_residual < vr.tol);
        if (bad) failed += (failed.empty() ? "k=" : ", k=") + std::to_string(f.degree);
      }
      summary = {{"command", "verify-range"}, {"fits", fits}, {"passed", failed.empty()}};
      if (!failed.empty()) {
        summary["outputs"] = outputs;
        print_summary(summary);
        throw VerificationFailure("range moment conditions violated at " + failed);
      }
    } else if (*c_sp) {
      const ImageGrid grid = centered_grid(2, sp.grid, sp.half_width);
      const ProjectionGeometry geo =
          ProjectionGeometry::covering_2d(grid, sp.angles, sp.offset_step * grid.min_spacing());
      const OperatorSvd svd(build_dense_operator(geo, grid));
      const SpectrumReport rep = analyze_spectrum(svd, parse_doubles(sp.gammas, "--gammas"), sp.band_limited);
      const std::string s1 = sp.out + "_sigma.csv", s2 = sp.out + "_norms.csv";
      atomic_write(s1, spectrum_sigma_csv(rep));
      atomic_write(s2, spectrum_norm_csv(rep));
      outputs.push_back(s1);
      outputs.push_back(s2);
      summary = {{"command", "spectrum"},
                 {"sigma_1", rep.sigma.front()},
                 {"numerical_rank", rep.numerical_rank},
                 {"decay_index_0.1", rep.decay_index(0.1)}};
    } else if (*c_sw) {
      const ImageGrid grid = centered_grid(2, sw.grid, sw.half_width);
      const ProjectionGeometry geo =
          ProjectionGeometry::covering_2d(grid, sw.angles, sw.offset_step * grid.min_spacing());
      const Image f = rasterize_phantom(load_phantom(sw.phantom), grid);
      const OperatorSvd svd(build_dense_operator(geo, grid));
      SweepConfig cfg;
      cfg.method = parse_reg_method(sw.method);
      cfg.schedule = {sw.coef, sw.power};
      cfg.relative_eps = parse_doubles(sw.eps, "--eps");
      cfg.trials = sw.trials;
      cfg.seed = sw.seed ? *sw.seed : env_seed(1);
      if (sw.expect != "any" && sw.expect != "converge" && sw.expect != "diverge")
        throw ConfigError("--expect must be converge, diverge or any");
      const SweepResult res = convergence_sweep(f, svd, cfg);
      std::string table = "relative_eps,epsilon,gamma,error,relative_error,noise_term,bias_term,within_bound\n";
      json errors = json::array();
      for (const SweepRow& r : res.rows) {
        table += format_double(r.relative_eps) + "," + format_double(r.epsilon) + "," + format_double(r.gamma) +
                 "," + format_double(r.error) + "," + format_double(r.relative_error) + "," +
                 format_double(r.noise_term) + "," + format_double(r.bias_term) + "," +
                 (r.within_bound ? "1" : "0") + "\n";
        errors.push_back(r.relative_error);
      }
      atomic_write(sw.out, table);
      outputs.push_back(sw.out);
      summary = {{"command", "sweep"},          {"method", to_string(cfg.method)},
                 {"relative_errors", errors},   {"converging", res.converging},
                 {"premise_holds", res.premise_holds}, {"premise_note", res.premise_note}};
      const bool mismatch = (sw.expect == "converge" && !res.converging) ||
                            (sw.expect == "diverge" && res.converging);
      if (mismatch) {
        summary["outputs"] = outputs;
        print_summary(summary);
        throw VerificationFailure("sweep trend does not match --expect " + sw.expect);
      }
    }
    summary["outputs"] = outputs;
    print_summary(summary);
    return 0;
  } catch (const VerificationFailure& e) {
    std::cerr << "verification failed: " << e.what() << "\n";
    return 3;
  } catch (const ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const InvalidArgument& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 1;
  }
}
