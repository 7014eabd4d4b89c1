#pragma once

#include <array>
#include <string>
#include <vector>

#include "radonms/geometry.hpp"
#include "radonms/grid.hpp"

namespace radonms {

/// Scalar potential on a 3D grid.
using ScalarField3 = Image;

/// Three-component field on a 3D grid.
struct VectorField3 {
  explicit VectorField3(ImageGrid grid);

  ImageGrid grid;
  std::array<std::vector<double>, 3> component;

  Vec3 at(std::size_t cell) const {
    return {component[0][cell], component[1][cell], component[2][cell]};
  }
  Image component_image(int axis) const;
};

/// Volume-weighted L^2 norm of |E| over the grid.
double l2_norm(const VectorField3& e);
VectorField3 operator-(const VectorField3& a, const VectorField3& b);

/// Average of 1/|x| over the box [-a/2, a/2] x [-b/2, b/2] x [-c/2, c/2].
double box_average_inverse_distance(double a, double b, double c);

/// a_3 in I(Rf) = a_3 f * 1/|x| for the unnormalized sphere integral.
inline constexpr double kA3 = 6.283185307179586476925286766559;

enum class PotentialPath {
  /// (1/(4 pi)) f * 1/|x| by zero-padded FFT convolution; the origin cell of
  /// the kernel holds the cell average of 1/|x|.
  fft_convolution,
  /// (1/(2 pi)) I(Rf), with I the probability direction average.
  back_projection,
};

struct PotentialConfig {
  PotentialPath path = PotentialPath::fft_convolution;
  /// Hemisphere directions for the back-projection path.
  int n_directions = 256;
};

/// phi = (a_3 / (2 (2 pi)^2)) f * 1/|x| = (1/(2 (2 pi)^2)) I(Rf) on the grid of f.
/// Throws InvalidArgument for non-3D input and when f is not clear of the grid
/// boundary (its outermost cell layer must vanish).
ScalarField3 potential_from_density(const Image& f, const PotentialConfig& cfg = {});

/// Potential of a sinogram: (1/(2 pi)) I(g) with I evaluated pointwise.
/// Throws TruncationError unless g's geometry covers `grid`.
ScalarField3 potential_from_sinogram(const Sinogram& g, const ImageGrid& grid);

/// E = -grad phi, centered differences, one-sided on the boundary layer.
VectorField3 grad_potential(const ScalarField3& phi);

/// Curl by the same centered / one-sided differences.
VectorField3 curl(const VectorField3& e);

/// Divergence by the same centered / one-sided differences.
Image divergence(const VectorField3& e);

/// -Laplacian with the 7-point stencil of step 2h: on interior cells this is
/// algebraically div(grad) of the centered differences above.
Image negative_laplacian_wide(const ScalarField3& phi);

/// True when every cell of the outermost layer is zero.
bool clear_of_boundary(const Image& f);

/// Support of the test densities; evaluation grids are padded around it.
struct ElectroConfig {
  int n_directions = 256;
  /// Margin of the evaluation grid as a fraction of the grid size per side.
  double pad_fraction = 0.5;
  /// Offset spacing as a multiple of the minimum cell spacing.
  double offset_step = 1.0;
};

/// One side-by-side comparison.
struct IdentityCheck {
  double lhs = 0.0;
  double rhs = 0.0;
  /// |lhs - rhs| / max(|lhs|, |rhs|), 0 when both vanish.
  double relative_gap = 0.0;
};

/// Norm identity: ||Rf||^2 in L^2(P^3) against (1/(2 (2 pi)^2)) ||grad I(Rf)||^2 in
/// L^2(R^3). The field side is evaluated on a padded grid plus the monopole
/// far-field outside it.
IdentityCheck verify_norm_identity(const Image& f, const ElectroConfig& cfg = {});

struct DivergenceCheck {
  /// ||-Laplacian phi - f|| / ||f|| on cells two layers inside the boundary.
  double laplacian_residual = 0.0;
  /// ||div E - f|| / ||f|| on the same cells.
  double divergence_residual = 0.0;
  /// max |div E - (-Laplacian phi)| / max |f| on the same cells.
  double stencil_mismatch = 0.0;
};

/// Divergence identity: f = div E = -Laplacian phi for phi = potential_from_density(f).
DivergenceCheck verify_divergence_identity(const Image& f);

/// Fidelity equivalence: ||Rf - g||^2 against 2 (2 pi)^2 ||E_f - E_g||^2. `g` must use
/// the geometry returned by electro_geometry(f.grid(), cfg).
IdentityCheck fidelity_equivalence(const Image& f, const Sinogram& g, const ElectroConfig& cfg = {});

/// Evaluation grid and the projection geometry that covers it.
ImageGrid electro_eval_grid(const ImageGrid& grid, const ElectroConfig& cfg);
ProjectionGeometry electro_geometry(const ImageGrid& grid, const ElectroConfig& cfg);

/// Far-field integral of |grad (Q / (4 pi r))|^2 outside the box [lo, hi]
/// around a charge at `center`.
double monopole_far_field_energy(double charge, const Vec3& center, const Vec3& lo,
                                 const Vec3& hi);

struct SlopeFit {
  double slope = 0.0;
  double r_min = 0.0;
  double r_max = 0.0;
  int samples = 0;
};

/// Least-squares slope of log phi against log r over cells with r in
/// [r_min, r_max] around `center`.
SlopeFit log_log_slope(const ScalarField3& phi, const Vec3& center, double r_min, double r_max);

struct A3Estimate {
  /// Median over the mid-range cells of 4 pi I_prob(Rf) / (f * 1/|x|).
  double a3 = 0.0;
  /// Relative spread (max - min) / median of the per-cell ratios.
  double spread = 0.0;
};

/// Numerical a_3 from a narrow blob at the origin of a centered grid.
A3Estimate estimate_a3(int n, double half_width, int n_directions);

/// Largest angular component relative to the radial one, in the norm ratio
/// ||E - (E.r)r|| / ||(E.r)r|| over cells with r in [r_min, r_max].
double angular_fraction(const VectorField3& e, const Vec3& center, double r_min, double r_max);

struct ResidualReport {
  std::string check;
  std::string resolution;
  double residual = 0.0;
  std::vector<double> refinement_trend;
  double tolerance = 0.0;
  bool passed = false;
};

struct ElectroSuiteConfig {
  /// Refinement levels (n cells per axis, hemisphere directions) for the
  /// Norm-identity and fidelity-equivalence levels; the last one is judged against the tolerance.
  std::vector<std::array<int, 2>> levels = {{16, 192}, {24, 224}, {32, 256}};
  /// Grids for the divergence check; the last one is judged.
  std::vector<int> divergence_levels = {24, 32, 48};
  double half_width = 3.0;
  double sigma = 0.6;
};

/// Standard Gaussian fixture suite: a_3 and point-charge slope, curl, norm identity,
/// divergence identity and fidelity equivalence with refinement trends.
std::vector<ResidualReport> run_electro_suite(const ElectroSuiteConfig& cfg = {});

/// Strictly decreasing sequence.
bool strictly_decreasing(const std::vector<double>& v);

}  // namespace radonms
