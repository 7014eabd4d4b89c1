#include "radonms/regularize.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "radonms/error.hpp"
#include "radonms/noise.hpp"
#include "radonms/parallel.hpp"

namespace radonms {

const char* to_string(RegMethod m) {
  switch (m) {
    case RegMethod::truncated_svd: return "truncated-svd";
    case RegMethod::tikhonov: return "tikhonov";
    case RegMethod::band_limited_fbp: return "band-limited-fbp";
  }
  return "?";
}

RegMethod parse_reg_method(const std::string& s) {
  std::string t = s;
  std::replace(t.begin(), t.end(), '_', '-');
  if (t == "truncated-svd" || t == "tsvd") return RegMethod::truncated_svd;
  if (t == "tikhonov") return RegMethod::tikhonov;
  if (t == "band-limited-fbp" || t == "fbp") return RegMethod::band_limited_fbp;
  throw InvalidArgument("unknown regularization method '" + s + "'");
}

OperatorSvd::OperatorSvd(DenseOperator op) : op_(std::move(op)) {
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(op_.weighted_matrix(),
                                           Eigen::ComputeThinU | Eigen::ComputeThinV);
  sigma_ = svd.singularValues();
  u_ = svd.matrixU();
  v_ = svd.matrixV();
}

int OperatorSvd::numerical_rank() const {
  if (sigma_.size() == 0 || sigma_[0] == 0.0) return 0;
  const double tol = 1e-12 * sigma_[0] * static_cast<double>(std::max(op_.rows(), op_.cols()));
  int r = 0;
  while (r < sigma_.size() && sigma_[r] > tol) ++r;
  return r;
}

Image OperatorSvd::apply_filter(const Sinogram& g, const Eigen::VectorXd& phi) const {
  if (!(g.geometry() == op_.geometry())) throw GeometryMismatch("regularizer: geometry mismatch");
  const Eigen::Map<const Eigen::VectorXd> gv(g.values().data(), g.size());
  const Eigen::VectorXd gw = op_.row_sqrt_measure().cwiseProduct(gv);
  const Eigen::VectorXd coef = phi.cwiseProduct(u_.transpose() * gw);
  const Eigen::VectorXd fw = v_ * coef / std::sqrt(op_.grid().cell_volume());
  return Image(op_.grid(), std::vector<double>(fw.data(), fw.data() + fw.size()));
}

Eigen::VectorXd filter_factors(const FilterFamily& fam, const Eigen::VectorXd& sigma) {
  if (!(fam.gamma > 0.0) || !std::isfinite(fam.gamma))
    throw InvalidArgument("regularization parameter gamma must be positive");
  Eigen::VectorXd phi = Eigen::VectorXd::Zero(sigma.size());
  if (sigma.size() == 0 || sigma[0] <= 0.0) return phi;
  const double s1 = sigma[0];
  switch (fam.method) {
    case RegMethod::truncated_svd:
      phi[0] = 1.0 / s1;
      for (Eigen::Index k = 1; k < sigma.size(); ++k)
        if (sigma[k] >= fam.gamma * s1 && sigma[k] > 0.0) phi[k] = 1.0 / sigma[k];
      break;
    case RegMethod::tikhonov:
      for (Eigen::Index k = 0; k < sigma.size(); ++k)
        phi[k] = sigma[k] / (sigma[k] * sigma[k] + fam.gamma * s1 * s1);
      break;
    case RegMethod::band_limited_fbp:
      throw InvalidArgument("band-limited-fbp has no SVD filter factors");
  }
  return phi;
}

double regularizer_norm(const FilterFamily& fam, const Eigen::VectorXd& sigma) {
  return filter_factors(fam, sigma).cwiseAbs().maxCoeff();
}

namespace {

SpectralFilterConfig band_config(double gamma) {
  if (!(gamma > 0.0) || !std::isfinite(gamma))
    throw InvalidArgument("regularization parameter gamma must be positive");
  SpectralFilterConfig cfg;
  cfg.band_fraction = 1.0 / (1.0 + gamma);
  return cfg;
}

}  // namespace

double fbp_operator_norm(const ProjectionGeometry& geo, const ImageGrid& grid, double gamma) {
  const SpectralFilterConfig cfg = band_config(gamma);
  const std::size_t rows = grid.cell_count();
  const std::size_t cols = geo.sample_count();
  if (rows * cols * sizeof(double) > kDefaultDenseCapBytes)
    throw CapacityError("fbp_operator_norm: explicit FBP matrix exceeds the memory cap");
  Eigen::MatrixXd t(rows, cols);
  const double sv = std::sqrt(grid.cell_volume());
  const int n_off = geo.n_offsets();
  parallel_for(cols, [&](std::size_t s) {
    Sinogram e(geo);
    const int j = static_cast<int>(s / n_off);
    e[s] = 1.0 / std::sqrt(geo.sample_measure(j));
    const Image f = fbp_reconstruct(e, grid, cfg, FbpPath::filter_then_backproject);
    for (std::size_t c = 0; c < rows; ++c) t(c, s) = sv * f[c];
  });
  const Eigen::BDCSVD<Eigen::MatrixXd> svd(t);
  return svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
}

Image apply_regularizer(const FilterFamily& fam, const Sinogram& g, const ImageGrid& grid,
                        const OperatorSvd* svd) {
  if (g.geometry().ndim() != grid.ndim()) throw GeometryMismatch("regularizer: dimension mismatch");
  if (fam.method == RegMethod::band_limited_fbp)
    return fbp_reconstruct(g, grid, band_config(fam.gamma), FbpPath::filter_then_backproject);
  std::optional<OperatorSvd> local;
  if (svd == nullptr) {
    local.emplace(build_dense_operator(g.geometry(), grid));
    svd = &*local;
  }
  if (!(svd->op().grid() == grid) || !(svd->op().geometry() == g.geometry()))
    throw GeometryMismatch("regularizer: decomposition belongs to another geometry or grid");
  return svd->apply_filter(g, filter_factors(fam, svd->sigma()));
}

int SpectrumReport::decay_index(double ratio) const {
  if (sigma.empty() || sigma[0] <= 0.0) return 0;
  for (std::size_t k = 0; k < sigma.size(); ++k)
    if (sigma[k] / sigma[0] < ratio) return static_cast<int>(k) + 1;
  return 0;
}

SpectrumReport analyze_spectrum(const OperatorSvd& svd, const std::vector<double>& gammas,
                                bool include_band_limited) {
  SpectrumReport r;
  r.sigma.assign(svd.sigma().data(), svd.sigma().data() + svd.sigma().size());
  r.numerical_rank = svd.numerical_rank();
  r.gammas = gammas;
  for (double gamma : gammas) {
    r.tsvd_norms.push_back(regularizer_norm({RegMethod::truncated_svd, gamma}, svd.sigma()));
    r.tikhonov_norms.push_back(regularizer_norm({RegMethod::tikhonov, gamma}, svd.sigma()));
    if (include_band_limited)
      r.band_limited_norms.push_back(
          fbp_operator_norm(svd.op().geometry(), svd.op().grid(), gamma));
  }
  return r;
}

double GammaSchedule::operator()(double eps) const { return coefficient * std::pow(eps, power); }

bool is_converging(const std::vector<double>& errors) {
  if (errors.size() < 2) return false;
  for (std::size_t k = 1; k < errors.size(); ++k)
    if (!(errors[k] < errors[k - 1])) return false;
  return errors.back() <= 0.9 * errors.front();
}

SweepResult convergence_sweep(const Image& f_true, const OperatorSvd& svd, const SweepConfig& cfg) {
  if (!(f_true.grid() == svd.op().grid())) throw GeometryMismatch("sweep: grid mismatch");
  if (cfg.relative_eps.empty()) throw InvalidArgument("sweep: empty noise list");
  if (cfg.trials < 1) throw InvalidArgument("sweep: trials must be >= 1");
  for (double e : cfg.relative_eps)
    if (!(e >= 0.0) || !std::isfinite(e)) throw InvalidArgument("sweep: noise levels must be >= 0");

  const Sinogram g = svd.op().apply(f_true);
  const double gnorm = l2_norm(g);
  const double fnorm = l2_norm(f_true);
  const ProjectionGeometry& geo = svd.op().geometry();
  const ImageGrid& grid = svd.op().grid();

  SweepResult out;
  for (double rel : cfg.relative_eps) {
    SweepRow row;
    row.relative_eps = rel;
    row.epsilon = rel * gnorm;
    row.gamma = cfg.schedule(rel);
    const FilterFamily fam{cfg.method, row.gamma};
    const double tnorm = cfg.method == RegMethod::band_limited_fbp
                             ? fbp_operator_norm(geo, grid, row.gamma)
                             : regularizer_norm(fam, svd.sigma());
    row.noise_term = tnorm * row.epsilon;
    row.bias_term = l2_norm(apply_regularizer(fam, g, grid, &svd) - f_true);
    double sum = 0.0, worst = 0.0;
    const int trials = rel == 0.0 ? 1 : cfg.trials;
    for (int t = 0; t < trials; ++t) {
      const Sinogram ge = add_noise(g, {row.epsilon, cfg.seed + static_cast<std::uint64_t>(t)});
      const double err = l2_norm(apply_regularizer(fam, ge, grid, &svd) - f_true);
      sum += err;
      worst = std::max(worst, err);
    }
    row.error = sum / trials;
    row.relative_error = fnorm > 0.0 ? row.error / fnorm : row.error;
    row.within_bound = worst <= (row.noise_term + row.bias_term) * (1.0 + 1e-9) + 1e-300;
    out.rows.push_back(row);
  }

  std::ostringstream note;
  for (std::size_t k = 1; k < out.rows.size(); ++k) {
    const SweepRow& a = out.rows[k - 1];
    const SweepRow& b = out.rows[k];
    if (!(b.relative_eps < a.relative_eps)) {
      note << "noise levels are not decreasing; ";
      out.premise_holds = false;
      break;
    }
    if (!(b.gamma < a.gamma)) {
      note << "gamma(eps) does not decrease at eps=" << b.relative_eps << "; ";
      out.premise_holds = false;
    }
    if (!(b.noise_term < a.noise_term)) {
      note << "||T_gamma|| eps does not decrease at eps=" << b.relative_eps << "; ";
      out.premise_holds = false;
    }
  }
  out.premise_note = note.str();
  if (!out.premise_note.empty()) out.premise_note.resize(out.premise_note.size() - 2);

  std::vector<double> errors;
  for (const SweepRow& r : out.rows) errors.push_back(r.error);
  out.converging = is_converging(errors);
  return out;
}

}  // namespace radonms
