#include "radonms/radon.hpp"

#include <cmath>
#include <string>

#include <algorithm>

#include "radonms/error.hpp"
#include "radonms/footprint.hpp"
#include "radonms/parallel.hpp"

namespace radonms {

namespace {

double dot(const Vec3& a, const Vec3& b) { return a[0] * b[0] + a[1] * b[1] + a[2] * b[2]; }

void check_pair(const ProjectionGeometry& geo, const ImageGrid& grid) {
  if (geo.ndim() != grid.ndim())
    throw GeometryMismatch("projection geometry is " + std::to_string(geo.ndim()) +
                           "D but the grid is " + std::to_string(grid.ndim()) + "D");
}

}  // namespace

Sinogram forward_project(const Image& f, const ProjectionGeometry& geo) {
  const ImageGrid& grid = f.grid();
  check_pair(geo, grid);
  const CellFootprint footprint(geo, grid);
  const int n_off = geo.n_offsets();
  Sinogram g(geo);
  auto values = g.values();

  parallel_for(static_cast<std::size_t>(geo.n_directions()), [&](std::size_t j) {
    double* row = values.data() + j * n_off;
    for (std::size_t c = 0; c < grid.cell_count(); ++c) {
      const double v = f[c];
      if (v == 0.0) continue;
      const bool inside =
          footprint.visit(c, static_cast<int>(j), [&](int i, double w) { row[i] += v * w; });
      if (!inside)
        throw TruncationError("image support exceeds the offset range x_max=" +
                              std::to_string(geo.x_max()));
    }
  });
  return g;
}

BackProjection back_project_with_report(const Sinogram& g, const ImageGrid& grid,
                                        BackProjectionMode mode) {
  const ProjectionGeometry& geo = g.geometry();
  check_pair(geo, grid);
  const CellFootprint footprint(geo, grid);
  const double scale = geo.offset_spacing() / grid.cell_volume();
  const double xmax = geo.x_max();
  const double dx = geo.offset_spacing();
  const int last = geo.n_offsets() - 1;
  Image out(grid);
  std::vector<std::size_t> truncated(grid.cell_count(), 0);
  auto values = out.values();

  parallel_for(grid.cell_count(), [&](std::size_t c) {
    const Vec3 x = grid.center(c);
    double acc = 0.0;
    std::size_t missed = 0;
    for (int j = 0; j < geo.n_directions(); ++j) {
      const auto prof = g.profile(j);
      double s = 0.0;
      if (mode == BackProjectionMode::cell_average) {
        if (!footprint.visit(c, j, [&](int i, double w) { s += prof[i] * w; })) {
          ++missed;
          continue;
        }
        s *= scale;
      } else {
        const double t = (dot(geo.direction(j), x) + xmax) / dx;
        if (t < -1e-9 || t > last + 1e-9) {
          ++missed;
          continue;
        }
        const int lo = std::clamp(static_cast<int>(std::floor(t)), 0, last - 1);
        const double frac = std::clamp(t - lo, 0.0, 1.0);
        s = prof[lo] * (1.0 - frac) + prof[lo + 1] * frac;
      }
      acc += geo.weight(j) * s;
    }
    values[c] = acc;
    truncated[c] = missed;
  });

  BackProjection result{std::move(out), 0};
  for (std::size_t m : truncated) result.truncated_samples += m;
  return result;
}

Image back_project(const Sinogram& g, const ImageGrid& grid, BackProjectionMode mode) {
  return back_project_with_report(g, grid, mode).image;
}

double adjoint_constant(const ProjectionGeometry& geometry) { return geometry.sphere_measure(); }

DenseOperator::DenseOperator(ProjectionGeometry geometry, ImageGrid grid, Eigen::MatrixXd matrix)
    : geometry_(std::move(geometry)), grid_(grid), matrix_(std::move(matrix)) {
  if (matrix_.rows() != static_cast<Eigen::Index>(geometry_.sample_count()) ||
      matrix_.cols() != static_cast<Eigen::Index>(grid_.cell_count()))
    throw InvalidArgument("dense operator shape does not match geometry and grid");
}

Sinogram DenseOperator::apply(const Image& f) const {
  if (!(f.grid() == grid_)) throw GeometryMismatch("dense operator: image grid mismatch");
  const Eigen::Map<const Eigen::VectorXd> x(f.values().data(), f.values().size());
  const Eigen::VectorXd y = matrix_ * x;
  return Sinogram(geometry_, std::vector<double>(y.data(), y.data() + y.size()));
}

Image DenseOperator::apply_transpose_rescaled(const Sinogram& g) const {
  if (!(g.geometry() == geometry_)) throw GeometryMismatch("dense operator: geometry mismatch");
  Eigen::VectorXd wg(g.size());
  const int n_off = geometry_.n_offsets();
  for (int j = 0; j < geometry_.n_directions(); ++j)
    for (int i = 0; i < n_off; ++i) wg[j * n_off + i] = geometry_.weight(j) * g.at(j, i);
  const Eigen::VectorXd x =
      (geometry_.offset_spacing() / grid_.cell_volume()) * (matrix_.transpose() * wg);
  return Image(grid_, std::vector<double>(x.data(), x.data() + x.size()));
}

Eigen::VectorXd DenseOperator::row_sqrt_measure() const {
  Eigen::VectorXd w(matrix_.rows());
  const int n_off = geometry_.n_offsets();
  for (int j = 0; j < geometry_.n_directions(); ++j)
    w.segment(j * n_off, n_off).setConstant(std::sqrt(geometry_.sample_measure(j)));
  return w;
}

Eigen::MatrixXd DenseOperator::weighted_matrix() const {
  return row_sqrt_measure().asDiagonal() * matrix_ / std::sqrt(grid_.cell_volume());
}

DenseOperator build_dense_operator(const ProjectionGeometry& geo, const ImageGrid& grid,
                                   std::size_t cap_bytes) {
  check_pair(geo, grid);
  const std::size_t rows = geo.sample_count();
  const std::size_t cols = grid.cell_count();
  if (rows * cols * sizeof(double) > cap_bytes)
    throw CapacityError("dense operator " + std::to_string(rows) + "x" + std::to_string(cols) +
                        " exceeds the memory cap of " + std::to_string(cap_bytes) + " bytes");

  const CellFootprint footprint(geo, grid);
  const int n_off = geo.n_offsets();
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(rows),
                                            static_cast<Eigen::Index>(cols));
  parallel_for(cols, [&](std::size_t c) {
    const auto col = static_cast<Eigen::Index>(c);
    for (int j = 0; j < geo.n_directions(); ++j) {
      const bool inside = footprint.visit(c, j, [&](int i, double w) { a(j * n_off + i, col) += w; });
      if (!inside) throw TruncationError("grid extends beyond the offset range of the geometry");
    }
  });
  return DenseOperator(geo, grid, std::move(a));
}

double MomentReport::worst_residual() const {
  double worst = 0.0;
  for (const auto& fit : fits)
    if (!fit.underdetermined) worst = std::max(worst, fit.relative_residual);
  return worst;
}

namespace {

/// Exponent triples (a, b, c) with a + b + c = k, active axes only.
std::vector<Index3> homogeneous_exponents(int ndim, int k) {
  std::vector<Index3> out;
  if (ndim == 2) {
    for (int a = k; a >= 0; --a) out.push_back({a, k - a, 0});
  } else {
    for (int a = k; a >= 0; --a)
      for (int b = k - a; b >= 0; --b) out.push_back({a, b, k - a - b});
  }
  return out;
}

}  // namespace

MomentReport check_range_moments(const Sinogram& g, int k_max) {
  if (k_max < 0) throw InvalidArgument("k_max must be >= 0");
  const ProjectionGeometry& geo = g.geometry();
  const int nd = geo.n_directions();
  MomentReport report;
  for (int k = 0; k <= k_max; ++k) {
    MomentFit fit;
    fit.degree = k;
    fit.moments.resize(nd);
    for (int j = 0; j < nd; ++j) {
      double m = 0.0;
      for (int i = 0; i < geo.n_offsets(); ++i) m += g.at(j, i) * std::pow(geo.offset(i), k);
      fit.moments[j] = m * geo.offset_spacing();
    }
    const auto exps = homogeneous_exponents(geo.ndim(), k);
    if (nd <= static_cast<int>(exps.size())) {
      fit.underdetermined = true;
      report.fits.push_back(std::move(fit));
      continue;
    }
    Eigen::MatrixXd basis(nd, static_cast<Eigen::Index>(exps.size()));
    Eigen::VectorXd rhs(nd);
    for (int j = 0; j < nd; ++j) {
      const Vec3& xi = geo.direction(j);
      const double sw = std::sqrt(geo.weight(j));
      for (std::size_t e = 0; e < exps.size(); ++e) {
        double v = 1.0;
        for (int a = 0; a < geo.ndim(); ++a) v *= std::pow(xi[a], exps[e][a]);
        basis(j, static_cast<Eigen::Index>(e)) = sw * v;
      }
      rhs[j] = sw * fit.moments[j];
    }
    const Eigen::VectorXd coef = basis.colPivHouseholderQr().solve(rhs);
    fit.coefficients.assign(coef.data(), coef.data() + coef.size());
    const double norm = rhs.norm();
    fit.relative_residual = norm > 0.0 ? (basis * coef - rhs).norm() / norm : 0.0;
    if (k == 0) {
      double mean = 0.0;
      for (int j = 0; j < nd; ++j) mean += geo.weight(j) * fit.moments[j];
      double dev = 0.0;
      for (double m : fit.moments) dev = std::max(dev, std::abs(m - mean));
      fit.max_relative_deviation = mean != 0.0 ? dev / std::abs(mean) : dev;
    }
    report.fits.push_back(std::move(fit));
  }
  return report;
}

}  // namespace radonms
