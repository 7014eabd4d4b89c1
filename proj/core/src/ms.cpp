#include "radonms/ms.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include <Eigen/Dense>

#include "radonms/error.hpp"
#include "radonms/footprint.hpp"
#include "radonms/noise.hpp"
#include "radonms/parallel.hpp"
#include "radonms/radon.hpp"
#include "radonms/regularize.hpp"
#include "radonms/spectral.hpp"

namespace radonms {

namespace {

double face_area(const ImageGrid& grid, int axis) { return grid.cell_volume() / grid.spacing(axis); }

template <class F>
void for_each_neighbor(const ImageGrid& grid, std::size_t cell, F&& f) {
  const Index3 idx = grid.multi_index(cell);
  std::size_t stride = 1;
  for (int a = 0; a < grid.ndim(); ++a) {
    if (idx[a] > 0) f(cell - stride, a);
    if (idx[a] < grid.dim(a) - 1) f(cell + stride, a);
    stride *= static_cast<std::size_t>(grid.dim(a));
  }
}

double box_perimeter(const ImageGrid& grid) {
  if (grid.ndim() == 2) return 2.0 * (grid.extent(0) + grid.extent(1));
  return 2.0 * (grid.extent(0) * grid.extent(1) + grid.extent(1) * grid.extent(2) +
                grid.extent(0) * grid.extent(2));
}

double perimeter_sum(const Partition& p) {
  const std::vector<double> per = discrete_perimeter(p);
  return std::accumulate(per.begin(), per.end(), 0.0);
}

}  // namespace

Partition::Partition(ImageGrid grid, int m, std::vector<int> labels, double delta)
    : grid_(std::move(grid)), m_(m), labels_(std::move(labels)), delta_(delta) {
  if (m_ < 1) throw InvalidArgument("partition: m must be >= 1");
  if (!(delta_ >= 0.0) || !std::isfinite(delta_)) throw InvalidArgument("partition: delta must be >= 0");
  if (labels_.size() != grid_.cell_count())
    throw InvalidArgument("partition: label count does not match the grid");
  for (int k : labels_)
    if (k < 0 || k >= m_) throw InvalidArgument("partition: label outside [0, m)");
}

Partition Partition::uniform(ImageGrid grid, int m, double delta) {
  std::vector<int> labels(grid.cell_count(), 0);
  return Partition(std::move(grid), m, std::move(labels), delta);
}

void Partition::set_label(std::size_t cell, int k) {
  if (k < 0 || k >= m_) throw InvalidArgument("partition: label outside [0, m)");
  labels_.at(cell) = k;
}

std::vector<std::size_t> Partition::cell_counts() const {
  std::vector<std::size_t> counts(m_, 0);
  for (int k : labels_) ++counts[k];
  return counts;
}

std::vector<double> Partition::measures() const {
  std::vector<double> out;
  for (std::size_t c : cell_counts()) out.push_back(static_cast<double>(c) * grid_.cell_volume());
  return out;
}

std::size_t Partition::min_cells() const {
  return static_cast<std::size_t>(std::ceil(delta_ / grid_.cell_volume() - 1e-9));
}

bool Partition::admissible() const {
  for (std::size_t c : cell_counts())
    if (c < min_cells() || c == 0) return false;
  return true;
}

Image Partition::indicator(int k) const {
  Image out(grid_);
  for (std::size_t c = 0; c < labels_.size(); ++c) out[c] = labels_[c] == k ? 1.0 : 0.0;
  return out;
}

Image PCFunction::image() const {
  if (values.size() != static_cast<std::size_t>(partition.m()))
    throw InvalidArgument("pc function: value count differs from m");
  Image out(partition.grid());
  for (std::size_t c = 0; c < out.size(); ++c) out[c] = values[partition.label(c)];
  out.check_finite();
  return out;
}

void MSConfig::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw InvalidArgument("ms: beta must be positive");
  if (m < 1) throw InvalidArgument("ms: m must be >= 1");
  if (delta && !(*delta > 0.0)) throw InvalidArgument("ms: delta must be positive");
  if (max_outer_iters < 1) throw InvalidArgument("ms: max_outer_iters must be >= 1");
  if (ridge && !(*ridge >= 0.0)) throw InvalidArgument("ms: ridge must be >= 0");
}

double MSConfig::delta_for(const ImageGrid& grid) const {
  return delta ? *delta : 4.0 * grid.cell_volume();
}

std::vector<double> discrete_perimeter(const Partition& p) {
  const ImageGrid& grid = p.grid();
  std::vector<double> per(p.m(), 0.0);
  for (std::size_t c = 0; c < grid.cell_count(); ++c) {
    const Index3 idx = grid.multi_index(c);
    std::size_t stride = 1;
    for (int a = 0; a < grid.ndim(); ++a) {
      if (idx[a] < grid.dim(a) - 1) {
        const int la = p.label(c), lb = p.label(c + stride);
        if (la != lb) {
          per[la] += face_area(grid, a);
          per[lb] += face_area(grid, a);
        }
      }
      stride *= static_cast<std::size_t>(grid.dim(a));
    }
  }
  return per;
}

double interface_area(const Partition& p) { return 0.5 * perimeter_sum(p); }

EnergyBreakdown evaluate_energy(const PCFunction& pc, const Sinogram& g, double beta) {
  if (!(beta >= 0.0)) throw InvalidArgument("energy: beta must be >= 0");
  if (g.geometry().ndim() != pc.partition.grid().ndim())
    throw GeometryMismatch("energy: dimension mismatch");
  EnergyBreakdown e;
  e.fidelity = std::pow(l2_norm(forward_project(pc.image(), g.geometry()) - g), 2);
  e.perimeter = perimeter_sum(pc.partition);
  e.total = e.fidelity + beta * e.perimeter;
  return e;
}

std::vector<double> fit_values(const Partition& p, const Sinogram& g, std::optional<double> ridge) {
  const int m = p.m();
  std::vector<Sinogram> cols;
  for (int k = 0; k < m; ++k) cols.push_back(forward_project(p.indicator(k), g.geometry()));
  Eigen::MatrixXd gram(m, m);
  Eigen::VectorXd rhs(m);
  for (int j = 0; j < m; ++j) {
    rhs[j] = inner(cols[j], g);
    for (int k = 0; k <= j; ++k) gram(j, k) = gram(k, j) = inner(cols[j], cols[k]);
  }
  const double rho = ridge ? *ridge : 1e-10 * gram.trace() / m;
  if (rho == 0.0) {
    const Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gram, Eigen::EigenvaluesOnly);
    const double top = eig.eigenvalues().cwiseAbs().maxCoeff();
    if (!(eig.eigenvalues().minCoeff() > 1e-12 * top))
      throw SingularSystemError(
          "fit_values: singular Gram matrix (empty or near-duplicate regions); use ridge > 0");
  }
  gram.diagonal().array() += rho;
  const Eigen::VectorXd v = gram.ldlt().solve(rhs);
  return {v.data(), v.data() + v.size()};
}

Partition update_partition(const PCFunction& pc, const Sinogram& g, const MSConfig& cfg,
                           SweepStats* stats) {
  cfg.validate();
  Partition p = pc.partition;
  const ImageGrid& grid = p.grid();
  const ProjectionGeometry& geo = g.geometry();
  const std::vector<double>& v = pc.values;
  if (v.size() != static_cast<std::size_t>(p.m())) throw InvalidArgument("sweep: value count differs from m");

  Sinogram r = forward_project(pc.image(), geo) - g;
  const CellFootprint footprint(geo, grid);
  std::vector<double> measure(geo.n_directions());
  for (int j = 0; j < geo.n_directions(); ++j) measure[j] = geo.sample_measure(j);
  const double tol = 1e-13 * (std::pow(l2_norm(r), 2) + cfg.beta * perimeter_sum(p)) + 1e-300;

  std::vector<std::size_t> order(grid.cell_count());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(cfg.sweep_seed);
  std::shuffle(order.begin(), order.end(), rng);

  std::vector<std::size_t> counts = p.cell_counts();
  const std::size_t floor_cells = p.min_cells();
  std::vector<std::size_t> col_index;
  std::vector<double> col_weight;
  SweepStats st;
  const int n_off = geo.n_offsets();

  for (std::size_t c : order) {
    const int la = p.label(c);
    std::vector<int> cand;
    for_each_neighbor(grid, c, [&](std::size_t nb, int) {
      const int lb = p.label(nb);
      if (lb != la && std::find(cand.begin(), cand.end(), lb) == cand.end()) cand.push_back(lb);
    });
    if (cand.empty()) continue;
    std::sort(cand.begin(), cand.end());

    col_index.clear();
    col_weight.clear();
    double s1 = 0.0, s2 = 0.0;
    for (int j = 0; j < geo.n_directions(); ++j) {
      footprint.visit(c, j, [&](int i, double w) {
        const std::size_t s = static_cast<std::size_t>(j) * n_off + i;
        col_index.push_back(s);
        col_weight.push_back(w);
        s1 += measure[j] * r[s] * w;
        s2 += measure[j] * w * w;
      });
    }

    int best = -1;
    double best_dj = 0.0;
    for (int b : cand) {
      const double d = v[b] - v[la];
      double before = 0.0, after = 0.0;
      for_each_neighbor(grid, c, [&](std::size_t nb, int a) {
        const int ln = p.label(nb);
        if (ln != la) before += face_area(grid, a);
        if (ln != b) after += face_area(grid, a);
      });
      const double dj = 2.0 * d * s1 + d * d * s2 + cfg.beta * 2.0 * (after - before);
      if (best < 0 || dj < best_dj) {
        best = b;
        best_dj = dj;
      }
    }
    if (!(best_dj < -tol)) continue;
    if (counts[la] - 1 < std::max<std::size_t>(floor_cells, 1)) {
      ++st.rejected_by_delta;
      continue;
    }
    const double d = v[best] - v[la];
    for (std::size_t k = 0; k < col_index.size(); ++k) r[col_index[k]] += d * col_weight[k];
    p.set_label(c, best);
    --counts[la];
    ++counts[best];
    ++st.moves;
  }
  if (stats) *stats = st;
  return p;
}

MSResult reconstruct_pc(const Sinogram& g, const MSConfig& cfg, const Partition& init) {
  cfg.validate();
  if (init.m() != cfg.m) throw InvalidArgument("reconstruct_pc: init has a different m");
  if (!init.admissible()) throw InvalidArgument("reconstruct_pc: init partition is not admissible");

  PCFunction cur{init, fit_values(init, g, cfg.ridge)};
  EnergyBreakdown e = evaluate_energy(cur, g, cfg.beta);
  std::vector<EnergyBreakdown> trace{e};
  int iterations = 0;
  bool converged = false;
  for (int it = 0; it < cfg.max_outer_iters; ++it) {
    MSConfig step = cfg;
    step.sweep_seed = cfg.sweep_seed + static_cast<std::uint64_t>(it);
    SweepStats st;
    PCFunction next{update_partition(cur, g, step, &st), cur.values};
    EnergyBreakdown en = evaluate_energy(next, g, cfg.beta);
    PCFunction refit{next.partition, fit_values(next.partition, g, cfg.ridge)};
    const EnergyBreakdown er = evaluate_energy(refit, g, cfg.beta);
    if (er.total <= en.total) {
      next = std::move(refit);
      en = er;
    }
    if (en.total > e.total) break;
    cur = std::move(next);
    e = en;
    trace.push_back(e);
    iterations = it + 1;
    if (st.moves == 0) {
      converged = true;
      break;
    }
  }
  return MSResult{std::move(cur), e, std::move(trace), iterations, converged};
}

Partition threshold_init(const Image& image, int m, double delta) {
  if (m < 1) throw InvalidArgument("threshold_init: m must be >= 1");
  const std::size_t n = image.size();
  if (n < static_cast<std::size_t>(m)) throw InvalidArgument("threshold_init: fewer cells than regions");
  std::vector<double> sorted(image.values().begin(), image.values().end());
  std::sort(sorted.begin(), sorted.end());
  std::vector<double> center(m);
  for (int k = 0; k < m; ++k) {
    const std::size_t lo = n * k / m, hi = n * (k + 1) / m;
    center[k] = std::accumulate(sorted.begin() + lo, sorted.begin() + hi, 0.0) / (hi - lo);
  }
  std::vector<int> labels(n, 0);
  auto assign = [&] {
    for (std::size_t c = 0; c < n; ++c) {
      int best = 0;
      for (int k = 1; k < m; ++k)
        if (std::abs(image[c] - center[k]) < std::abs(image[c] - center[best])) best = k;
      labels[c] = best;
    }
  };
  for (int iter = 0; iter < 100; ++iter) {
    assign();
    std::vector<double> sum(m, 0.0);
    std::vector<std::size_t> cnt(m, 0);
    for (std::size_t c = 0; c < n; ++c) {
      sum[labels[c]] += image[c];
      ++cnt[labels[c]];
    }
    bool moved = false;
    for (int k = 0; k < m; ++k)
      if (cnt[k] > 0 && sum[k] / cnt[k] != center[k]) {
        center[k] = sum[k] / cnt[k];
        moved = true;
      }
    if (!moved) break;
  }
  std::vector<int> rank(m);
  std::iota(rank.begin(), rank.end(), 0);
  std::sort(rank.begin(), rank.end(), [&](int a, int b) { return center[a] < center[b]; });
  std::vector<int> relabel(m);
  std::vector<double> sorted_center(m);
  for (int k = 0; k < m; ++k) {
    relabel[rank[k]] = k;
    sorted_center[k] = center[rank[k]];
  }
  assign();
  for (int& l : labels) l = relabel[l];

  Partition p(image.grid(), m, std::move(labels), delta);
  const std::size_t need = std::max<std::size_t>(p.min_cells(), 1);
  for (int k = 0; k < m; ++k) {
    std::vector<std::size_t> counts = p.cell_counts();
    if (counts[k] >= need) continue;
    std::vector<std::size_t> donors;
    for (std::size_t c = 0; c < n; ++c)
      if (p.label(c) != k) donors.push_back(c);
    std::stable_sort(donors.begin(), donors.end(), [&](std::size_t a, std::size_t b) {
      return std::abs(image[a] - sorted_center[k]) < std::abs(image[b] - sorted_center[k]);
    });
    for (std::size_t c : donors) {
      if (counts[k] >= need) break;
      const int from = p.label(c);
      if (counts[from] <= need) continue;
      p.set_label(c, k);
      --counts[from];
      ++counts[k];
    }
  }
  return p;
}

double label_distance(const Partition& a, const Partition& b) {
  if (!(a.grid() == b.grid())) throw GeometryMismatch("label_distance: grid mismatch");
  std::size_t diff = 0;
  for (std::size_t c = 0; c < a.labels().size(); ++c) diff += a.label(c) != b.label(c);
  return static_cast<double>(diff) / static_cast<double>(a.labels().size());
}

bool decreasing_trend(const std::vector<double>& v) {
  if (v.size() < 2) return false;
  for (std::size_t k = 1; k < v.size(); ++k)
    if (v[k] > v[k - 1]) return false;
  if (v.front() == 0.0) return v.back() == 0.0;
  return v.back() < v.front();
}

StabilityReport stability_experiment(const Sinogram& g, const MSConfig& cfg, const Partition& init,
                                     const StabilityConfig& scfg) {
  const double gnorm = l2_norm(g);
  const Sinogram e = unit_noise(g.geometry(), scfg.seed);
  const MSResult ref = reconstruct_pc(g, cfg, init);
  StabilityReport rep;
  rep.relative_eps = scfg.relative_eps;
  std::vector<Partition> parts;
  for (double eps : scfg.relative_eps) {
    const Sinogram gn = g + (eps * gnorm) * e;
    const MSResult res = reconstruct_pc(gn, cfg, init);
    rep.values.push_back(res.best.values);
    rep.label_distances.push_back(label_distance(res.best.partition, ref.best.partition));
    double dv = 0.0;
    for (std::size_t k = 0; k < res.best.values.size(); ++k)
      dv += std::pow(res.best.values[k] - ref.best.values[k], 2);
    rep.value_distances.push_back(std::sqrt(dv));
  }
  for (std::size_t n = 1; n < rep.values.size(); ++n) {
    double s = 0.0;
    for (std::size_t k = 0; k < rep.values[n].size(); ++k)
      s += std::pow(rep.values[n][k] - rep.values[n - 1][k], 2);
    rep.value_steps.push_back(std::sqrt(s));
  }
  rep.values_cauchy = decreasing_trend(rep.value_steps);
  rep.labels_converge = decreasing_trend(rep.label_distances);
  return rep;
}

RegularizationReport regularization_experiment(const PCFunction& truth,
                                               const ProjectionGeometry& geometry,
                                               const MSConfig& cfg,
                                               const RegularizationConfig& rcfg) {
  cfg.validate();
  if (rcfg.trials < 1) throw InvalidArgument("regularization: trials must be >= 1");
  const ImageGrid& grid = truth.partition.grid();
  const Image f_star = truth.image();
  const Sinogram g_star = forward_project(f_star, geometry);
  const double gnorm = l2_norm(g_star);
  const double scale =
      rcfg.schedule.scale > 0.0 ? rcfg.schedule.scale : gnorm * gnorm / box_perimeter(grid);
  const double p_star = perimeter_sum(truth.partition);
  const double delta = cfg.delta_for(grid);

  RegularizationReport rep;
  for (double eps : rcfg.relative_eps) {
    RegularizationRow row;
    row.relative_eps = eps;
    row.beta = scale * rcfg.schedule.coefficient * std::pow(eps, rcfg.schedule.power);
    MSConfig run = cfg;
    run.beta = row.beta;
    for (int t = 0; t < rcfg.trials; ++t) {
      const Sinogram g =
          add_noise(g_star, {eps * gnorm, rcfg.seed + static_cast<std::uint64_t>(t)});
      const Image fbp = fbp_reconstruct(g, grid, SpectralFilterConfig{});
      const MSResult res = reconstruct_pc(g, run, threshold_init(fbp, cfg.m, delta));
      row.error += relative_l2_error(res.best.image(), f_star);
      row.perimeter_gap += p_star > 0.0 ? std::abs(res.best_energy.perimeter - p_star) / p_star
                                        : res.best_energy.perimeter;
    }
    row.error /= rcfg.trials;
    row.perimeter_gap /= rcfg.trials;
    rep.rows.push_back(row);
  }
  std::ostringstream note;
  for (std::size_t k = 1; k < rep.rows.size(); ++k) {
    const RegularizationRow& a = rep.rows[k - 1];
    const RegularizationRow& b = rep.rows[k];
    if (!(b.beta < a.beta)) {
      note << "beta does not decrease at eps=" << b.relative_eps << "; ";
      rep.premise_holds = false;
    }
    const double qa = a.relative_eps * a.relative_eps / a.beta;
    const double qb = b.relative_eps * b.relative_eps / b.beta;
    if (!(qb < qa * (1.0 - 1e-12))) {
      note << "eps^2/beta does not decrease at eps=" << b.relative_eps << "; ";
      rep.premise_holds = false;
    }
  }
  rep.premise_note = note.str();
  if (!rep.premise_note.empty()) rep.premise_note.resize(rep.premise_note.size() - 2);
  std::vector<double> errors;
  for (const auto& r : rep.rows) errors.push_back(r.error);
  rep.converging = is_converging(errors);
  return rep;
}

}  // namespace radonms
