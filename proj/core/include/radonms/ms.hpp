#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "radonms/geometry.hpp"
#include "radonms/grid.hpp"

namespace radonms {

/// Label field: each cell belongs to one of m regions, labels 0..m-1.
class Partition {
 public:
  /// Throws InvalidArgument on a size mismatch, a label outside [0, m) or a
  /// negative delta. Admissibility is checked separately.
  Partition(ImageGrid grid, int m, std::vector<int> labels, double delta);

  /// Every cell in region 0.
  static Partition uniform(ImageGrid grid, int m, double delta);

  const ImageGrid& grid() const { return grid_; }
  int m() const { return m_; }
  double delta() const { return delta_; }
  const std::vector<int>& labels() const { return labels_; }
  int label(std::size_t cell) const { return labels_[cell]; }
  void set_label(std::size_t cell, int k);

  std::vector<std::size_t> cell_counts() const;
  /// Cell count times cell volume per region.
  std::vector<double> measures() const;
  /// Every region measure >= delta.
  bool admissible() const;
  /// Smallest cell count allowed by delta.
  std::size_t min_cells() const;

  Image indicator(int k) const;
  bool operator==(const Partition& other) const = default;

 private:
  ImageGrid grid_;
  int m_;
  std::vector<int> labels_;
  double delta_;
};

/// Piecewise-constant function sum_k values[k] chi_k.
struct PCFunction {
  Partition partition;
  std::vector<double> values;

  Image image() const;
};

struct MSConfig {
  double beta = 1e-3;
  int m = 2;
  /// Region measure floor; default four cells' volume.
  std::optional<double> delta;
  int max_outer_iters = 50;
  std::uint64_t sweep_seed = 0;
  /// Ridge of the value solve; default 1e-10 * trace(G) / m.
  std::optional<double> ridge;

  /// Throws InvalidArgument on beta <= 0, m < 1, delta <= 0 or iters < 1.
  void validate() const;
  double delta_for(const ImageGrid& grid) const;
};

struct EnergyBreakdown {
  double fidelity = 0.0;
  double perimeter = 0.0;
  double total = 0.0;
};

/// Per region: faces shared with a differently labeled cell, times face area.
/// Faces on the grid boundary do not count.
std::vector<double> discrete_perimeter(const Partition& p);

/// Total area of interfaces, each face counted once (half the perimeter sum).
double interface_area(const Partition& p);

/// ||R f - g||^2 + beta * sum_k perimeter_k.
EnergyBreakdown evaluate_energy(const PCFunction& pc, const Sinogram& g, double beta);

/// Least-squares region values from the m x m normal equations
/// G_jk = <R chi_j, R chi_k>. With ridge = 0 a singular G throws
/// SingularSystemError.
std::vector<double> fit_values(const Partition& p, const Sinogram& g,
                               std::optional<double> ridge = std::nullopt);

struct SweepStats {
  std::size_t moves = 0;
  std::size_t rejected_by_delta = 0;
};

/// One seeded sweep of single-cell moves to labels of face neighbors, each
/// accepted only when it lowers J_beta and keeps every region above delta.
Partition update_partition(const PCFunction& pc, const Sinogram& g, const MSConfig& cfg,
                           SweepStats* stats = nullptr);

struct MSResult {
  PCFunction best;
  EnergyBreakdown best_energy;
  std::vector<EnergyBreakdown> trace;
  int iterations = 0;
  /// A sweep made no move before max_outer_iters.
  bool converged = false;
};

/// Alternates fit_values and update_partition from `init`. The trace holds
/// the initial energy and one entry per outer iteration.
MSResult reconstruct_pc(const Sinogram& g, const MSConfig& cfg, const Partition& init);

/// Labels from m-quantile thresholds of `image`, refined by 1D k-means and
/// ordered by increasing mean value. Regions below delta are topped up with
/// the cells whose values lie closest to their mean.
Partition threshold_init(const Image& image, int m, double delta);

/// Fraction of cells whose labels differ.
double label_distance(const Partition& a, const Partition& b);

/// Non-increasing, and strictly lower at the end than at the start unless the
/// whole sequence is zero.
bool decreasing_trend(const std::vector<double>& v);

struct StabilityConfig {
  /// Relative noise levels eps_n (times ||g||) along the sequence.
  std::vector<double> relative_eps = {0.1, 0.05, 0.025, 0.0125};
  /// One noise direction shared by all levels, so g^eps_n -> g.
  std::uint64_t seed = 7;
};

struct StabilityReport {
  std::vector<double> relative_eps;
  std::vector<std::vector<double>> values;
  /// ||v_{n+1} - v_n|| for successive reconstructions.
  std::vector<double> value_steps;
  /// Label distance of each reconstruction to the noiseless one.
  std::vector<double> label_distances;
  /// ||v_n - v_noiseless||.
  std::vector<double> value_distances;
  bool values_cauchy = false;
  bool labels_converge = false;
};

/// Reconstructions from g + eps_n ||g|| e (fixed unit noise e) from a common init.
StabilityReport stability_experiment(const Sinogram& g, const MSConfig& cfg, const Partition& init,
                                     const StabilityConfig& scfg = {});

struct BetaSchedule {
  /// beta = scale * coefficient * eps^power; scale = 0 selects ||g||^2 / P,
  /// P the perimeter of the grid box.
  double coefficient = 1.0;
  double power = 1.0;
  double scale = 0.0;
};

struct RegularizationConfig {
  std::vector<double> relative_eps = {0.1, 0.05, 0.025};
  BetaSchedule schedule;
  std::uint64_t seed = 11;
  /// Noise draws averaged per level.
  int trials = 3;
};

struct RegularizationRow {
  double relative_eps = 0.0;
  double beta = 0.0;
  /// Mean relative L^2 error to f*.
  double error = 0.0;
  /// Mean |perimeter - perimeter*| / perimeter*.
  double perimeter_gap = 0.0;
};

struct RegularizationReport {
  std::vector<RegularizationRow> rows;
  /// beta -> 0 and eps^2 / beta -> 0 along the sweep.
  bool premise_holds = true;
  std::string premise_note;
  /// Errors strictly decrease and the last is below 0.9 x the first.
  bool converging = false;
};

/// Noisy data from R f*, thresholded-FBP init, reconstruction with beta(eps).
RegularizationReport regularization_experiment(const PCFunction& truth,
                                               const ProjectionGeometry& geometry,
                                               const MSConfig& cfg,
                                               const RegularizationConfig& rcfg = {});

}  // namespace radonms
