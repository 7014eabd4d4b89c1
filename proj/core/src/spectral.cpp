#include "radonms/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "radonms/error.hpp"
#include "radonms/fft.hpp"
#include "radonms/radon.hpp"

namespace radonms {

void SpectralFilterConfig::validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha)) throw InvalidArgument("alpha must be >= 0");
  if (!(band_fraction > 0.0 && band_fraction <= 1.0))
    throw InvalidArgument("band_fraction must lie in (0, 1]");
  if (boundary == Boundary::zero_padded && !(pad_fraction >= 0.25))
    throw InvalidArgument("zero-padded filtering needs pad_fraction >= 0.25");
}

double spectral_window(double k, double k_nyquist, const SpectralFilterConfig& cfg) {
  const double cut = cfg.band_fraction * k_nyquist;
  if (cfg.window == Window::none) {
    if (cfg.band_fraction >= 1.0) return 1.0;
    return k <= cut ? 1.0 : 0.0;
  }
  if (k <= cut) return 1.0;
  if (k >= k_nyquist) return 0.0;
  const double c = std::cos(0.5 * std::numbers::pi * (k - cut) / (k_nyquist - cut));
  return c * c;
}

namespace {

double power_multiplier(double k, double alpha) {
  if (alpha == 0.0) return 1.0;
  return std::pow(k, 2.0 * alpha);
}


/// Applies the radial multiplier to `data` laid out on `dims` with `spacing`
/// (periodic), in place.
void apply_multiplier(std::vector<double>& data, const std::vector<int>& dims,
                      const std::vector<double>& spacing, double alpha,
                      const SpectralFilterConfig& cfg, double k_nyquist) {
  RealFft fft(dims);
  std::vector<std::complex<double>> spec(fft.complex_size());
  fft.forward(data, spec);
  const int nd = static_cast<int>(dims.size());
  const int half0 = dims[0] / 2 + 1;
  const int n1 = nd > 1 ? dims[1] : 1;
  const int n2 = nd > 2 ? dims[2] : 1;
  const double two_pi = 2.0 * std::numbers::pi;
  std::size_t idx = 0;
  for (int m2 = 0; m2 < n2; ++m2) {
    const double k2 = nd > 2 ? two_pi * signed_frequency(m2, n2) / (n2 * spacing[2]) : 0.0;
    for (int m1 = 0; m1 < n1; ++m1) {
      const double k1 = nd > 1 ? two_pi * signed_frequency(m1, n1) / (n1 * spacing[1]) : 0.0;
      for (int m0 = 0; m0 < half0; ++m0, ++idx) {
        const double k0 = two_pi * m0 / (dims[0] * spacing[0]);
        const double k = std::sqrt(k0 * k0 + k1 * k1 + k2 * k2);
        spec[idx] *= power_multiplier(k, alpha) * spectral_window(k, k_nyquist, cfg);
      }
    }
  }
  fft.inverse(spec, data);
}

int margin_cells(int dim, double fraction) {
  return static_cast<int>(std::ceil(fraction * dim));
}

}  // namespace

Image fractional_laplacian(const Image& u, const SpectralFilterConfig& cfg) {
  cfg.validate();
  const ImageGrid& grid = u.grid();
  const int nd = grid.ndim();
  const double k_nyq = std::numbers::pi / grid.min_spacing();
  std::vector<double> spacing(nd);
  for (int a = 0; a < nd; ++a) spacing[a] = grid.spacing(a);

  if (cfg.boundary == Boundary::periodic) {
    std::vector<int> dims(nd);
    for (int a = 0; a < nd; ++a) dims[a] = grid.dim(a);
    std::vector<double> data(u.values().begin(), u.values().end());
    apply_multiplier(data, dims, spacing, cfg.alpha, cfg, k_nyq);
    return Image(grid, std::move(data));
  }

  std::vector<int> margin(3, 0), dims(nd);
  for (int a = 0; a < nd; ++a) {
    margin[a] = margin_cells(grid.dim(a), cfg.pad_fraction);
    dims[a] = grid.dim(a) + 2 * margin[a];
  }
  const int p1 = nd > 1 ? dims[1] : 1;
  std::vector<double> data(static_cast<std::size_t>(dims[0]) * p1 * (nd > 2 ? dims[2] : 1), 0.0);
  auto padded_index = [&](const Index3& idx) {
    return static_cast<std::size_t>(idx[0] + margin[0]) +
           static_cast<std::size_t>(dims[0]) *
               (static_cast<std::size_t>(idx[1] + margin[1]) +
                static_cast<std::size_t>(p1) * static_cast<std::size_t>(idx[2] + margin[2]));
  };
  for (std::size_t c = 0; c < grid.cell_count(); ++c) data[padded_index(grid.multi_index(c))] = u[c];
  apply_multiplier(data, dims, spacing, cfg.alpha, cfg, k_nyq);
  Image out(grid);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) out[c] = data[padded_index(grid.multi_index(c))];
  return out;
}

namespace {

struct MomentGaussian {
  double mass = 0.0;
  Vec3 center{};
  double sigma = 1.0;
};

// Mass from the zeroth moment, centroid from a least-squares fit of the first
// moments m1(xi) = M p . xi, clamped into the grid box.
MomentGaussian fit_moment_gaussian(const Sinogram& g, const ImageGrid& grid) {
  const ProjectionGeometry& geo = g.geometry();
  const int nd = grid.ndim();
  const int nj = geo.n_directions();
  MomentGaussian ref;
  double extent = std::numeric_limits<double>::infinity();
  for (int a = 0; a < nd; ++a) extent = std::min(extent, grid.extent(a));
  ref.sigma = 0.1 * extent;
  Eigen::MatrixXd A(nj, nd);
  Eigen::VectorXd b(nj);
  double scale = 0.0;
  for (int j = 0; j < nj; ++j) {
    const auto prof = g.profile(j);
    double m0 = 0.0, m1 = 0.0;
    for (int i = 0; i < geo.n_offsets(); ++i) {
      m0 += prof[i];
      m1 += prof[i] * geo.offset(i);
      scale += std::abs(prof[i]) * geo.weight(j);
    }
    ref.mass += geo.weight(j) * m0 * geo.offset_spacing();
    const double sw = std::sqrt(geo.weight(j));
    const Vec3 xi = geo.direction(j);
    for (int a = 0; a < nd; ++a) A(j, a) = sw * xi[a];
    b(j) = sw * m1 * geo.offset_spacing();
  }
  scale *= geo.offset_spacing();
  if (!(std::abs(ref.mass) > 1e-3 * scale)) {
    ref.mass = 0.0;
    return ref;
  }
  const Eigen::VectorXd p = A.colPivHouseholderQr().solve(b / ref.mass);
  for (int a = 0; a < nd; ++a) {
    const double lo = grid.box_lo()[a] + 3.0 * ref.sigma;
    const double hi = grid.box_hi()[a] - 3.0 * ref.sigma;
    ref.center[a] = lo < hi ? std::clamp(p(a), lo, hi) : 0.5 * (grid.box_lo()[a] + grid.box_hi()[a]);
  }
  return ref;
}

}  // namespace

double inversion_constant(int ndim) {
  if (ndim == 2) return 2.0 * std::numbers::pi / (2.0 * 2.0 * std::numbers::pi);
  if (ndim == 3) return 4.0 * std::numbers::pi / (2.0 * std::pow(2.0 * std::numbers::pi, 2));
  throw InvalidArgument("inversion_constant: ndim must be 2 or 3");
}

Sinogram filter_profiles(const Sinogram& g, double alpha, const SpectralFilterConfig& cfg,
                         double k_nyquist) {
  const ProjectionGeometry& geo = g.geometry();
  const int n = geo.n_offsets();
  const int len = 16 * n;
  const int lead = (len - n) / 2;
  Sinogram out(geo);
  std::vector<double> buf(len);
  for (int j = 0; j < geo.n_directions(); ++j) {
    std::fill(buf.begin(), buf.end(), 0.0);
    const auto prof = g.profile(j);
    for (int i = 0; i < n; ++i) buf[lead + i] = prof[i];
    apply_multiplier(buf, {len}, {geo.offset_spacing()}, alpha, cfg, k_nyquist);
    for (int i = 0; i < n; ++i) out.at(j, i) = buf[lead + i];
  }
  return out;
}

Image fbp_reconstruct(const Sinogram& g, const ImageGrid& grid, const SpectralFilterConfig& cfg,
                      FbpPath path) {
  cfg.validate();
  const ProjectionGeometry& geo = g.geometry();
  if (geo.ndim() != grid.ndim()) throw GeometryMismatch("fbp: dimension mismatch");
  if (!geo.covers(grid))
    throw TruncationError("fbp: sinogram offsets do not cover the reconstruction grid");
  const int nd = grid.ndim();
  const double alpha = 0.5 * (nd - 1);
  const double c = inversion_constant(nd);
  const double k_nyq = std::numbers::pi / grid.min_spacing();

  if (path == FbpPath::filter_then_backproject) {
    const Sinogram filtered = filter_profiles(g, alpha, cfg, k_nyq);
    Image out = back_project(filtered, grid, BackProjectionMode::point);
    out *= c;
    return out;
  }

  // I(g) decays only like 1/|x|. A Gaussian with the same mass and centroid
  // is removed analytically so the filtered remainder has a short tail, and the
  // remaining tail is kept away from the output cells by a margin.
  const MomentGaussian ref = fit_moment_gaussian(g, grid);
  Sinogram rest = g;
  if (ref.mass != 0.0) {
    const double norm = ref.mass / (std::sqrt(2.0 * std::numbers::pi) * ref.sigma);
    for (int j = 0; j < geo.n_directions(); ++j) {
      const Vec3 xi = geo.direction(j);
      double shift = 0.0;
      for (int a = 0; a < nd; ++a) shift += xi[a] * ref.center[a];
      for (int i = 0; i < geo.n_offsets(); ++i) {
        const double t = (geo.offset(i) - shift) / ref.sigma;
        rest.at(j, i) -= norm * std::exp(-0.5 * t * t);
      }
    }
  }
  int margin = 0;
  for (int a = 0; a < nd; ++a)
    margin = std::max(margin, margin_cells(grid.dim(a), cfg.pad_fraction));
  const ImageGrid big = grid.padded(margin);
  const Image bp = back_project(rest, big, BackProjectionMode::point);
  SpectralFilterConfig filter = cfg;
  filter.alpha = alpha;
  const Image filtered = fractional_laplacian(bp, filter);
  Image out(grid);
  const double amp = ref.mass / std::pow(std::sqrt(2.0 * std::numbers::pi) * ref.sigma, nd);
  for (std::size_t i = 0; i < grid.cell_count(); ++i) {
    Index3 idx = grid.multi_index(i);
    const Vec3 x = grid.center(i);
    double r2 = 0.0;
    for (int a = 0; a < nd; ++a) {
      idx[a] += margin;
      r2 += (x[a] - ref.center[a]) * (x[a] - ref.center[a]);
    }
    out[i] = c * filtered.at(idx);
    if (ref.mass != 0.0) out[i] += amp * std::exp(-0.5 * r2 / (ref.sigma * ref.sigma));
  }
  return out;
}

}  // namespace radonms
