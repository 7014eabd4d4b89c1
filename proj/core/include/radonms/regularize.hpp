#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "radonms/radon.hpp"
#include "radonms/spectral.hpp"

namespace radonms {

enum class RegMethod { truncated_svd, tikhonov, band_limited_fbp };

const char* to_string(RegMethod m);
/// Accepts "truncated-svd", "tikhonov", "band-limited-fbp" (underscores too).
RegMethod parse_reg_method(const std::string& s);

struct FilterFamily {
  RegMethod method = RegMethod::tikhonov;
  /// truncated_svd: keep sigma_k >= gamma * sigma_1.
  /// tikhonov: (A^T A + gamma sigma_1^2 I)^{-1} A^T in the weighted L^2 spaces.
  /// band_limited_fbp: band_fraction = 1 / (1 + gamma).
  double gamma = 1e-2;
};

/// SVD of the operator between the weighted spaces L^2(P^N) and L^2(D):
/// A_w = diag(sqrt(sample measure)) A / sqrt(cell volume) = U S V^T.
class OperatorSvd {
 public:
  explicit OperatorSvd(DenseOperator op);

  const DenseOperator& op() const { return op_; }
  const Eigen::VectorXd& sigma() const { return sigma_; }
  const Eigen::MatrixXd& u() const { return u_; }
  const Eigen::MatrixXd& v() const { return v_; }
  /// Count of sigma_k > 1e-12 * sigma_1 * max(rows, cols).
  int numerical_rank() const;

  /// f = V diag(phi(sigma)) U^T g in the weighted coordinates, mapped back to
  /// cell values.
  Image apply_filter(const Sinogram& g, const Eigen::VectorXd& phi) const;

 private:
  DenseOperator op_;
  Eigen::VectorXd sigma_;
  Eigen::MatrixXd u_;
  Eigen::MatrixXd v_;
};

/// Filter factors phi_k (the image of u_k is phi_k v_k).
Eigen::VectorXd filter_factors(const FilterFamily& fam, const Eigen::VectorXd& sigma);

/// ||T_gamma|| from L^2(P^N) to L^2(D). For band_limited_fbp this needs the
/// explicit FBP matrix and is computed by `fbp_operator_norm`.
double regularizer_norm(const FilterFamily& fam, const Eigen::VectorXd& sigma);

/// Norm of the band-limited FBP map by SVD of its explicit matrix (one FBP per
/// sinogram sample; desk scale only).
double fbp_operator_norm(const ProjectionGeometry& geometry, const ImageGrid& grid, double gamma);

/// T_gamma g. truncated_svd / tikhonov use `svd` when given, otherwise build
/// the dense operator and its SVD. Throws GeometryMismatch when `svd` belongs
/// to a different geometry or grid.
Image apply_regularizer(const FilterFamily& fam, const Sinogram& g, const ImageGrid& grid,
                        const OperatorSvd* svd = nullptr);

struct SpectrumReport {
  std::vector<double> sigma;
  int numerical_rank = 0;
  std::vector<double> gammas;
  std::vector<double> tsvd_norms;
  std::vector<double> tikhonov_norms;
  /// Empty unless requested.
  std::vector<double> band_limited_norms;

  /// First 1-based k with sigma_k / sigma_1 < ratio, or 0 if none.
  int decay_index(double ratio) const;
};

SpectrumReport analyze_spectrum(const OperatorSvd& svd, const std::vector<double>& gammas,
                                bool include_band_limited = false);

/// gamma(eps) = coefficient * eps^power, eps being the relative noise level.
struct GammaSchedule {
  double coefficient = 1.0;
  double power = 1.0;
  double operator()(double eps) const;
};

struct SweepConfig {
  RegMethod method = RegMethod::tikhonov;
  GammaSchedule schedule;
  /// Noise levels relative to ||g||.
  std::vector<double> relative_eps = {0.2, 0.1, 0.05, 0.025};
  std::uint64_t seed = 1;
  /// Noise draws averaged per level.
  int trials = 4;
};

struct SweepRow {
  double relative_eps = 0.0;
  double epsilon = 0.0;
  double gamma = 0.0;
  /// Mean over trials of ||T g^eps - f||.
  double error = 0.0;
  double relative_error = 0.0;
  /// ||T_gamma|| * epsilon.
  double noise_term = 0.0;
  /// ||T_gamma g - f||.
  double bias_term = 0.0;
  /// Largest error over the trials does not exceed noise_term + bias_term.
  bool within_bound = true;
};

struct SweepResult {
  std::vector<SweepRow> rows;
  /// gamma(eps) -> 0 and ||T_gamma|| eps -> 0 along the (decreasing) eps list.
  bool premise_holds = true;
  std::string premise_note;
  /// Errors strictly decrease with eps and the last is below 0.9 x the first.
  bool converging = false;
};

/// Regularized reconstructions of f_true from A f_true + noise along the eps
/// list, with the two terms of the error bound.
SweepResult convergence_sweep(const Image& f_true, const OperatorSvd& svd, const SweepConfig& cfg);

/// The trend predicate used by convergence_sweep.
bool is_converging(const std::vector<double>& errors);

}  // namespace radonms
