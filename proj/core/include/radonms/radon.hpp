#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "radonms/geometry.hpp"
#include "radonms/grid.hpp"

namespace radonms {

/// Discrete Radon transform of the cell-wise constant image. Each sample is
/// the exact hyperplane integral of f, smoothed in X by the linear
/// interpolation hat of the offset lattice (see CellFootprint). Weights are
/// nonnegative and the map is linear in f.
///
/// Throws TruncationError when a nonzero cell projects outside [-x_max, x_max].
Sinogram forward_project(const Image& f, const ProjectionGeometry& geometry);

struct BackProjection {
  Image image;
  /// Number of (cell sub-point, direction) evaluations whose offset fell
  /// outside [-x_max, x_max]; they contribute zero.
  std::size_t truncated_samples = 0;
};

enum class BackProjectionMode {
  /// Average of the interpolated value over each cell. Exact adjoint of
  /// forward_project up to the sphere measure:
  ///   inner(forward_project(f), g) == sphere_measure() * inner(f, back_project(g)).
  cell_average,
  /// Interpolated value at the cell center only.
  point,
};

/// Dual map: at each cell, the probability-weighted average over directions of
/// g(xi . x, xi), linearly interpolated in X.
BackProjection back_project_with_report(const Sinogram& g, const ImageGrid& grid,
                                        BackProjectionMode mode = BackProjectionMode::cell_average);
Image back_project(const Sinogram& g, const ImageGrid& grid,
                   BackProjectionMode mode = BackProjectionMode::cell_average);

/// Constant c with <Rf, g>_{L^2(P^N)} = c <f, Ig>_{L^2}; equals |S^{N-1}|.
double adjoint_constant(const ProjectionGeometry& geometry);

/// Explicit matrix of forward_project: rows are sinogram samples
/// (direction-major), columns are image cells.
class DenseOperator {
 public:
  DenseOperator(ProjectionGeometry geometry, ImageGrid grid, Eigen::MatrixXd matrix);

  const ProjectionGeometry& geometry() const { return geometry_; }
  const ImageGrid& grid() const { return grid_; }
  const Eigen::MatrixXd& matrix() const { return matrix_; }
  Eigen::Index rows() const { return matrix_.rows(); }
  Eigen::Index cols() const { return matrix_.cols(); }

  Sinogram apply(const Image& f) const;
  /// (offset_spacing / cell_volume) * A^T diag(w) g, which equals back_project(g).
  Image apply_transpose_rescaled(const Sinogram& g) const;

  /// sqrt of the sinogram sample measures, one per row.
  Eigen::VectorXd row_sqrt_measure() const;
  /// Matrix of the operator between the weighted L^2 spaces:
  /// diag(sqrt(sample measure)) * A / sqrt(cell volume).
  Eigen::MatrixXd weighted_matrix() const;

 private:
  ProjectionGeometry geometry_;
  ImageGrid grid_;
  Eigen::MatrixXd matrix_;
};

/// Default cap on rows*cols*8 bytes for build_dense_operator.
inline constexpr std::size_t kDefaultDenseCapBytes = std::size_t{512} << 20;

/// Throws CapacityError when the matrix would exceed `cap_bytes`.
DenseOperator build_dense_operator(const ProjectionGeometry& geometry, const ImageGrid& grid,
                                   std::size_t cap_bytes = kDefaultDenseCapBytes);

struct MomentFit {
  int degree = 0;
  /// m_k(xi_j) = sum_i g(X_i, xi_j) X_i^k dX, one entry per stored direction.
  std::vector<double> moments;
  /// Least-squares coefficients of the homogeneous degree-k polynomial.
  std::vector<double> coefficients;
  /// ||m - fit|| / ||m||; zero when m vanishes.
  double relative_residual = 0.0;
  /// max_j |m_0(xi_j) - mean| / |mean| (degree 0 only).
  double max_relative_deviation = 0.0;
  /// Too few directions to test the degree (the fit would interpolate).
  bool underdetermined = false;
};

struct MomentReport {
  std::vector<MomentFit> fits;
  /// Largest residual among the determined fits.
  double worst_residual() const;
};

/// Moment (range) conditions: m_k must be a homogeneous polynomial of degree k
/// in xi for every sinogram in the range of R.
MomentReport check_range_moments(const Sinogram& g, int k_max);

}  // namespace radonms
