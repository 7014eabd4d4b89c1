#include "radonms/electrostatics.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <sstream>

#include "radonms/error.hpp"
#include "radonms/fft.hpp"
#include "radonms/parallel.hpp"
#include "radonms/phantom.hpp"
#include "radonms/radon.hpp"

namespace radonms {

namespace {

constexpr double kPi = std::numbers::pi;

void require_3d(const ImageGrid& grid, const char* what) {
  if (grid.ndim() != 3) throw InvalidArgument(std::string(what) + ": a 3D grid is required");
}

// Integral of 1/|x| over [0,a] x [0,b] x [0,c].
double octant_integral(double a, double b, double c) {
  const double d = std::sqrt(a * a + b * b + c * c);
  return b * c * std::log((a + d) / std::hypot(b, c)) + a * c * std::log((b + d) / std::hypot(a, c)) +
         a * b * std::log((c + d) / std::hypot(a, b)) - 0.5 * a * a * std::atan(b * c / (a * d)) -
         0.5 * b * b * std::atan(a * c / (b * d)) - 0.5 * c * c * std::atan(a * b / (c * d));
}

// Centered difference along `axis`, one-sided on the first and last layer.
std::vector<double> difference(std::span<const double> u, const ImageGrid& grid, int axis) {
  std::vector<double> out(u.size());
  const int n = grid.dim(axis);
  const double h = grid.spacing(axis);
  std::size_t stride = 1;
  for (int a = 0; a < axis; ++a) stride *= static_cast<std::size_t>(grid.dim(a));
  for (std::size_t c = 0; c < u.size(); ++c) {
    const int i = grid.multi_index(c)[axis];
    if (i == 0)
      out[c] = (u[c + stride] - u[c]) / h;
    else if (i == n - 1)
      out[c] = (u[c] - u[c - stride]) / h;
    else
      out[c] = (u[c + stride] - u[c - stride]) / (2.0 * h);
  }
  return out;
}

bool interior(const Index3& idx, const ImageGrid& grid, int layers) {
  for (int a = 0; a < 3; ++a)
    if (idx[a] < layers || idx[a] > grid.dim(a) - 1 - layers) return false;
  return true;
}

Vec3 centroid(const Image& f) {
  Vec3 c{0.0, 0.0, 0.0};
  double m = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    const Vec3 x = f.grid().center(i);
    for (int a = 0; a < 3; ++a) c[a] += f[i] * x[a];
    m += f[i];
  }
  if (m == 0.0) return {0.0, 0.0, 0.0};
  for (double& v : c) v /= m;
  return c;
}

double sinogram_mass(const Sinogram& g) {
  const ProjectionGeometry& geo = g.geometry();
  double m = 0.0;
  for (int j = 0; j < geo.n_directions(); ++j) {
    double s = 0.0;
    for (double v : g.profile(j)) s += v;
    m += geo.weight(j) * s * geo.offset_spacing();
  }
  return m;
}

double relative_gap(double a, double b) {
  const double s = std::max(std::abs(a), std::abs(b));
  return s == 0.0 ? 0.0 : std::abs(a - b) / s;
}

// 2 (2 pi)^2 (||E||^2 on the evaluation box + monopole far field).
double field_energy(const ScalarField3& phi, double charge, const Vec3& center) {
  const VectorField3 e = grad_potential(phi);
  const double box = std::pow(l2_norm(e), 2);
  const double far =
      monopole_far_field_energy(charge, center, phi.grid().box_lo(), phi.grid().box_hi());
  return 2.0 * std::pow(2.0 * kPi, 2) * (box + far);
}

}  // namespace

VectorField3::VectorField3(ImageGrid g) : grid(std::move(g)) {
  require_3d(grid, "VectorField3");
  for (auto& c : component) c.assign(grid.cell_count(), 0.0);
}

Image VectorField3::component_image(int axis) const { return Image(grid, component[axis]); }

double l2_norm(const VectorField3& e) {
  double s = 0.0;
  for (const auto& c : e.component)
    for (double v : c) s += v * v;
  return std::sqrt(s * e.grid.cell_volume());
}

VectorField3 operator-(const VectorField3& a, const VectorField3& b) {
  if (!(a.grid == b.grid)) throw GeometryMismatch("vector field grid mismatch");
  VectorField3 out(a.grid);
  for (int k = 0; k < 3; ++k)
    for (std::size_t i = 0; i < out.component[k].size(); ++i)
      out.component[k][i] = a.component[k][i] - b.component[k][i];
  return out;
}

double box_average_inverse_distance(double a, double b, double c) {
  if (!(a > 0.0 && b > 0.0 && c > 0.0)) throw InvalidArgument("box sides must be positive");
  return 8.0 * octant_integral(0.5 * a, 0.5 * b, 0.5 * c) / (a * b * c);
}

bool clear_of_boundary(const Image& f) {
  double peak = 0.0, edge = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    peak = std::max(peak, std::abs(f[i]));
    if (!interior(f.grid().multi_index(i), f.grid(), 1)) edge = std::max(edge, std::abs(f[i]));
  }
  return edge <= 1e-4 * peak;
}

ScalarField3 potential_from_density(const Image& f, const PotentialConfig& cfg) {
  const ImageGrid& grid = f.grid();
  require_3d(grid, "potential_from_density");
  if (!clear_of_boundary(f))
    throw InvalidArgument(
        "potential_from_density: density reaches the grid boundary; pad the grid");

  if (cfg.path == PotentialPath::back_projection) {
    const ProjectionGeometry geo =
        ProjectionGeometry::covering_3d(grid, cfg.n_directions, grid.min_spacing());
    return potential_from_sinogram(forward_project(f, geo), grid);
  }

  const std::vector<int> pdims = {2 * grid.dim(0), 2 * grid.dim(1), 2 * grid.dim(2)};
  const RealFft fft(pdims);
  std::vector<double> kernel(fft.real_size()), data(fft.real_size(), 0.0);
  const double origin_value =
      box_average_inverse_distance(grid.spacing(0), grid.spacing(1), grid.spacing(2));
  for (int k = 0; k < pdims[2]; ++k)
    for (int j = 0; j < pdims[1]; ++j)
      for (int i = 0; i < pdims[0]; ++i) {
        const double x = signed_frequency(i, pdims[0]) * grid.spacing(0);
        const double y = signed_frequency(j, pdims[1]) * grid.spacing(1);
        const double z = signed_frequency(k, pdims[2]) * grid.spacing(2);
        const double r = std::sqrt(x * x + y * y + z * z);
        kernel[i + static_cast<std::size_t>(pdims[0]) * (j + static_cast<std::size_t>(pdims[1]) * k)] =
            r == 0.0 ? origin_value : 1.0 / r;
      }
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const Index3 idx = grid.multi_index(c);
    data[idx[0] + static_cast<std::size_t>(pdims[0]) *
                      (idx[1] + static_cast<std::size_t>(pdims[1]) * idx[2])] = f[c];
  }
  std::vector<std::complex<double>> fk(fft.complex_size()), kk(fft.complex_size());
  fft.forward(data, fk);
  fft.forward(kernel, kk);
  for (std::size_t i = 0; i < fk.size(); ++i) fk[i] *= kk[i];
  fft.inverse(fk, data);

  const double scale = grid.cell_volume() * kA3 / (2.0 * std::pow(2.0 * kPi, 2));
  ScalarField3 phi(grid);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const Index3 idx = grid.multi_index(c);
    phi[c] = scale * data[idx[0] + static_cast<std::size_t>(pdims[0]) *
                                       (idx[1] + static_cast<std::size_t>(pdims[1]) * idx[2])];
  }
  return phi;
}

ScalarField3 potential_from_sinogram(const Sinogram& g, const ImageGrid& grid) {
  require_3d(grid, "potential_from_sinogram");
  if (!g.geometry().covers(grid))
    throw TruncationError("potential_from_sinogram: geometry does not cover the grid");
  Image phi = back_project(g, grid, BackProjectionMode::point);
  phi *= 1.0 / (2.0 * kPi);
  return phi;
}

VectorField3 grad_potential(const ScalarField3& phi) {
  require_3d(phi.grid(), "grad_potential");
  VectorField3 e(phi.grid());
  for (int a = 0; a < 3; ++a) {
    e.component[a] = difference(phi.values(), phi.grid(), a);
    for (double& v : e.component[a]) v = -v;
  }
  return e;
}

VectorField3 curl(const VectorField3& e) {
  VectorField3 out(e.grid);
  for (int a = 0; a < 3; ++a) {
    const int b = (a + 1) % 3;
    const int c = (a + 2) % 3;
    const std::vector<double> dbc = difference(e.component[c], e.grid, b);
    const std::vector<double> dcb = difference(e.component[b], e.grid, c);
    for (std::size_t i = 0; i < dbc.size(); ++i) out.component[a][i] = dbc[i] - dcb[i];
  }
  return out;
}

Image divergence(const VectorField3& e) {
  Image out(e.grid);
  for (int a = 0; a < 3; ++a) {
    const std::vector<double> d = difference(e.component[a], e.grid, a);
    for (std::size_t i = 0; i < d.size(); ++i) out[i] += d[i];
  }
  return out;
}

Image negative_laplacian_wide(const ScalarField3& phi) {
  const ImageGrid& grid = phi.grid();
  require_3d(grid, "negative_laplacian_wide");
  Image out(grid);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const Index3 idx = grid.multi_index(c);
    if (!interior(idx, grid, 2)) continue;
    double s = 0.0;
    std::size_t stride = 1;
    for (int a = 0; a < 3; ++a) {
      const double h = grid.spacing(a);
      s += (phi[c + 2 * stride] - 2.0 * phi[c] + phi[c - 2 * stride]) / (4.0 * h * h);
      stride *= static_cast<std::size_t>(grid.dim(a));
    }
    out[c] = -s;
  }
  return out;
}

ImageGrid electro_eval_grid(const ImageGrid& grid, const ElectroConfig& cfg) {
  require_3d(grid, "electro_eval_grid");
  if (!(cfg.pad_fraction >= 0.0)) throw InvalidArgument("pad_fraction must be >= 0");
  int n = 0;
  for (int a = 0; a < 3; ++a) n = std::max(n, grid.dim(a));
  return grid.padded(static_cast<int>(std::ceil(cfg.pad_fraction * n)));
}

ProjectionGeometry electro_geometry(const ImageGrid& grid, const ElectroConfig& cfg) {
  if (!(cfg.offset_step > 0.0)) throw InvalidArgument("offset_step must be positive");
  const ImageGrid eval = electro_eval_grid(grid, cfg);
  return ProjectionGeometry::covering_3d(eval, cfg.n_directions,
                                         cfg.offset_step * grid.min_spacing());
}

double monopole_far_field_energy(double charge, const Vec3& center, const Vec3& lo,
                                 const Vec3& hi) {
  if (charge == 0.0) return 0.0;
  for (int a = 0; a < 3; ++a)
    if (!(center[a] > lo[a] && center[a] < hi[a]))
      throw InvalidArgument("monopole_far_field_energy: charge outside the box");
  // Integral over S^2 of 1/R(w), R the distance to the box along w.
  constexpr int n = 40000;
  const double golden = kPi * (3.0 - std::sqrt(5.0));
  double sum = 0.0;
  for (int k = 0; k < n; ++k) {
    const double z = 1.0 - (2.0 * k + 1.0) / n;
    const double rho = std::sqrt(std::max(0.0, 1.0 - z * z));
    const Vec3 w{rho * std::cos(golden * k), rho * std::sin(golden * k), z};
    double inv = 0.0;
    for (int a = 0; a < 3; ++a) {
      if (w[a] > 0.0) inv = std::max(inv, w[a] / (hi[a] - center[a]));
      if (w[a] < 0.0) inv = std::max(inv, -w[a] / (center[a] - lo[a]));
    }
    sum += inv;
  }
  const double q = charge / (4.0 * kPi);
  return q * q * sum * 4.0 * kPi / n;
}

IdentityCheck verify_norm_identity(const Image& f, const ElectroConfig& cfg) {
  require_3d(f.grid(), "verify_norm_identity");
  const ImageGrid eval = electro_eval_grid(f.grid(), cfg);
  const ProjectionGeometry geo = electro_geometry(f.grid(), cfg);
  const Sinogram rf = forward_project(f, geo);
  IdentityCheck out;
  out.lhs = std::pow(l2_norm(rf), 2);
  out.rhs = field_energy(potential_from_sinogram(rf, eval), total_mass(f), centroid(f));
  out.relative_gap = relative_gap(out.lhs, out.rhs);
  return out;
}

DivergenceCheck verify_divergence_identity(const Image& f) {
  const ScalarField3 phi = potential_from_density(f);
  const Image lap = negative_laplacian_wide(phi);
  const Image div = divergence(grad_potential(phi));
  const ImageGrid& grid = f.grid();
  double rl = 0.0, rd = 0.0, nf = 0.0, mis = 0.0, fmax = 0.0;
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    if (!interior(grid.multi_index(c), grid, 2)) continue;
    rl += std::pow(lap[c] - f[c], 2);
    rd += std::pow(div[c] - f[c], 2);
    nf += f[c] * f[c];
    mis = std::max(mis, std::abs(div[c] - lap[c]));
    fmax = std::max(fmax, std::abs(f[c]));
  }
  DivergenceCheck out;
  if (nf > 0.0) {
    out.laplacian_residual = std::sqrt(rl / nf);
    out.divergence_residual = std::sqrt(rd / nf);
  } else {
    out.laplacian_residual = std::sqrt(rl * grid.cell_volume());
    out.divergence_residual = std::sqrt(rd * grid.cell_volume());
  }
  out.stencil_mismatch = fmax > 0.0 ? mis / fmax : mis;
  return out;
}

IdentityCheck fidelity_equivalence(const Image& f, const Sinogram& g, const ElectroConfig& cfg) {
  require_3d(f.grid(), "fidelity_equivalence");
  const ImageGrid eval = electro_eval_grid(f.grid(), cfg);
  if (!g.geometry().covers(eval))
    throw TruncationError("fidelity_equivalence: sinogram does not cover the evaluation grid");
  const Sinogram diff = forward_project(f, g.geometry()) - g;
  IdentityCheck out;
  out.lhs = std::pow(l2_norm(diff), 2);
  out.rhs = field_energy(potential_from_sinogram(diff, eval), sinogram_mass(diff), centroid(f));
  out.relative_gap = relative_gap(out.lhs, out.rhs);
  return out;
}

SlopeFit log_log_slope(const ScalarField3& phi, const Vec3& center, double r_min, double r_max) {
  double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
  SlopeFit fit;
  fit.r_min = r_min;
  fit.r_max = r_max;
  for (std::size_t c = 0; c < phi.size(); ++c) {
    const Vec3 x = phi.grid().center(c);
    const double r = std::hypot(x[0] - center[0], x[1] - center[1], x[2] - center[2]);
    if (r < r_min || r > r_max || !(phi[c] > 0.0)) continue;
    const double lx = std::log(r), ly = std::log(phi[c]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++fit.samples;
  }
  if (fit.samples < 2) throw InvalidArgument("log_log_slope: too few samples in the radius band");
  const double n = fit.samples;
  fit.slope = (n * sxy - sx * sy) / (n * sxx - sx * sx);
  return fit;
}

A3Estimate estimate_a3(int n, double half_width, int n_directions) {
  const ImageGrid grid = centered_grid(3, n, half_width);
  const Image f = gaussian_image(grid, 1.5 * grid.min_spacing());
  const ScalarField3 direct = potential_from_density(f);
  const ScalarField3 bp = potential_from_density(f, {PotentialPath::back_projection, n_directions});
  std::vector<double> ratios;
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const Vec3 x = grid.center(c);
    const double r = std::hypot(x[0], x[1], x[2]);
    if (r < 0.3 * half_width || r > 0.8 * half_width) continue;
    // bp = I_prob(Rf) / (2 pi); direct = (1/(4 pi)) f * 1/|x|.
    const double i_prob = 2.0 * kPi * bp[c];
    const double conv = 4.0 * kPi * direct[c];
    ratios.push_back(4.0 * kPi * i_prob / conv);
  }
  if (ratios.empty()) throw InvalidArgument("estimate_a3: grid too small");
  std::sort(ratios.begin(), ratios.end());
  A3Estimate est;
  est.a3 = ratios[ratios.size() / 2];
  est.spread = (ratios.back() - ratios.front()) / est.a3;
  return est;
}

double angular_fraction(const VectorField3& e, const Vec3& center, double r_min, double r_max) {
  double radial = 0.0, angular = 0.0;
  for (std::size_t c = 0; c < e.grid.cell_count(); ++c) {
    const Vec3 x = e.grid.center(c);
    const Vec3 d{x[0] - center[0], x[1] - center[1], x[2] - center[2]};
    const double r = std::hypot(d[0], d[1], d[2]);
    if (r < r_min || r > r_max) continue;
    const Vec3 v = e.at(c);
    const double er = (v[0] * d[0] + v[1] * d[1] + v[2] * d[2]) / r;
    double t = 0.0;
    for (int a = 0; a < 3; ++a) t += std::pow(v[a] - er * d[a] / r, 2);
    radial += er * er;
    angular += t;
  }
  return radial > 0.0 ? std::sqrt(angular / radial) : 0.0;
}

bool strictly_decreasing(const std::vector<double>& v) {
  if (v.size() < 2) return false;
  for (std::size_t k = 1; k < v.size(); ++k)
    if (!(v[k] < v[k - 1])) return false;
  return true;
}

std::vector<ResidualReport> run_electro_suite(const ElectroSuiteConfig& cfg) {
  if (cfg.levels.empty() || cfg.divergence_levels.empty())
    throw InvalidArgument("electro suite: empty refinement levels");
  std::vector<ResidualReport> out;
  auto res_name = [](int n, int dirs) {
    std::ostringstream s;
    s << n << "^3";
    if (dirs > 0) s << "/" << dirs;
    return s.str();
  };
  const int n_last = cfg.levels.back()[0];
  const int d_last = cfg.levels.back()[1];

  {
    const A3Estimate est = estimate_a3(n_last, cfg.half_width, d_last);
    ResidualReport r{"a3", res_name(n_last, d_last), std::abs(est.a3 / kA3 - 1.0), {}, 0.02};
    r.passed = r.residual < r.tolerance;
    out.push_back(r);
  }
  {
    const ImageGrid grid = centered_grid(3, n_last, cfg.half_width);
    const Image blob = gaussian_image(grid, 1.5 * grid.min_spacing());
    const ScalarField3 phi = potential_from_density(blob);
    const SlopeFit fit =
        log_log_slope(phi, {0.0, 0.0, 0.0}, 0.3 * cfg.half_width, 0.9 * cfg.half_width);
    ResidualReport r{"point_charge_slope", res_name(n_last, 0), std::abs(fit.slope + 1.0), {}, 0.05};
    r.passed = r.residual < r.tolerance;
    out.push_back(r);
  }
  {
    const ImageGrid grid = centered_grid(3, n_last, cfg.half_width);
    const Image f = gaussian_image(grid, cfg.sigma);
    const ScalarField3 phi = potential_from_density(f);
    const VectorField3 e = grad_potential(phi);
    const VectorField3 c = curl(e);
    double jac = 0.0;
    for (int a = 0; a < 3; ++a)
      for (int b = 0; b < 3; ++b)
        for (double v : difference(e.component[a], grid, b)) jac += v * v;
    jac = std::sqrt(jac * grid.cell_volume());
    ResidualReport rc{"curl", res_name(n_last, 0), jac > 0.0 ? l2_norm(c) / jac : 0.0, {}, 1e-2};
    rc.passed = rc.residual < rc.tolerance;
    out.push_back(rc);
    ResidualReport ra{"radial_field", res_name(n_last, 0),
                      angular_fraction(e, {0.0, 0.0, 0.0}, 2.0 * cfg.sigma, 0.8 * cfg.half_width),
                      {}, 0.02};
    ra.passed = ra.residual < ra.tolerance;
    out.push_back(ra);

    const ScalarField3 bp = potential_from_density(f, {PotentialPath::back_projection, 128});
    ResidualReport rp{"potential_two_path", res_name(n_last, 128), relative_l2_error(bp, phi), {}, 0.05};
    rp.passed = rp.residual < rp.tolerance;
    out.push_back(rp);
  }

  ResidualReport l3{"norm_identity", res_name(n_last, d_last), 0.0, {}, 0.10};
  ResidualReport e24{"fidelity_equivalence", res_name(n_last, d_last), 0.0, {}, 0.10};
  for (const auto& level : cfg.levels) {
    const ImageGrid grid = centered_grid(3, level[0], cfg.half_width);
    ElectroConfig ec;
    ec.n_directions = level[1];
    const Image f = gaussian_image(grid, cfg.sigma);
    l3.refinement_trend.push_back(verify_norm_identity(f, ec).relative_gap);
    const Image f0 = gaussian_image(grid, 0.8 * cfg.sigma, 1.5, {0.3 * cfg.sigma, -0.2 * cfg.sigma, 0.0});
    const Sinogram g = forward_project(f0, electro_geometry(grid, ec));
    e24.refinement_trend.push_back(fidelity_equivalence(f, g, ec).relative_gap);
  }
  for (ResidualReport* r : {&l3, &e24}) {
    r->residual = r->refinement_trend.back();
    r->passed = r->residual < r->tolerance && strictly_decreasing(r->refinement_trend);
    out.push_back(*r);
  }

  ResidualReport l4l{"divergence_laplacian", res_name(cfg.divergence_levels.back(), 0), 0.0, {}, 0.05};
  ResidualReport l4d{"divergence_field", res_name(cfg.divergence_levels.back(), 0), 0.0, {}, 0.05};
  ResidualReport l4s{"divergence_stencil_identity", res_name(cfg.divergence_levels.back(), 0), 0.0, {}, 1e-10};
  for (int n : cfg.divergence_levels) {
    const ImageGrid grid = centered_grid(3, n, cfg.half_width);
    const DivergenceCheck d = verify_divergence_identity(gaussian_image(grid, cfg.sigma));
    l4l.refinement_trend.push_back(d.laplacian_residual);
    l4d.refinement_trend.push_back(d.divergence_residual);
    l4s.refinement_trend.push_back(d.stencil_mismatch);
  }
  for (ResidualReport* r : {&l4l, &l4d}) {
    r->residual = r->refinement_trend.back();
    r->passed = r->residual < r->tolerance && strictly_decreasing(r->refinement_trend);
  }
  l4s.residual = *std::max_element(l4s.refinement_trend.begin(), l4s.refinement_trend.end());
  l4s.passed = l4s.residual < l4s.tolerance;
  out.push_back(l4l);
  out.push_back(l4d);
  out.push_back(l4s);
  return out;
}

}  // namespace radonms
