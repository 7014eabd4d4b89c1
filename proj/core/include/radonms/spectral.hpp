#pragma once

#include "radonms/geometry.hpp"
#include "radonms/grid.hpp"

namespace radonms {

enum class Window { none, cosine };

/// How the FFT treats the image boundary.
enum class Boundary {
  /// Embed in a zero margin of pad_fraction * dim cells on each side.
  zero_padded,
  /// Treat the grid as one period (exact for periodic band-limited inputs).
  periodic,
};

struct SpectralFilterConfig {
  /// Power of the Laplacian: the multiplier is |k|^(2 alpha).
  double alpha = 0.5;
  /// Pass band as a fraction of the grid Nyquist frequency pi / min(spacing).
  double band_fraction = 0.9;
  /// none: hard cut above the band (no cut at all when band_fraction == 1).
  /// cosine: cos^2 taper from the band edge down to zero at Nyquist.
  Window window = Window::cosine;
  Boundary boundary = Boundary::zero_padded;
  double pad_fraction = 0.5;

  /// Throws InvalidArgument on alpha < 0, band outside (0, 1] or a zero-padded
  /// margin below 25%.
  void validate() const;
};

/// Band-limiting factor in [0, 1] at angular frequency |k|.
double spectral_window(double k, double k_nyquist, const SpectralFilterConfig& cfg);

/// (-Laplacian)^alpha by FFT: multiply the spectrum by |k|^(2 alpha) (physical
/// angular frequency), apply the window, transform back.
Image fractional_laplacian(const Image& u, const SpectralFilterConfig& cfg);

enum class FbpPath {
  /// Back-project onto a padded grid, then apply (-Laplacian)^((N-1)/2).
  backproject_then_filter,
  /// Filter each profile by |k|^(N-1) in the offset variable, then back-project.
  filter_then_backproject,
};

/// Constant of the inversion formula when I is the probability-weighted
/// direction average: |S^{N-1}| / (2 (2 pi)^(N-1)). 1/2 in 2D, 1/(2 pi) in 3D.
double inversion_constant(int ndim);

/// Filtered back-projection f = C (-Laplacian)^((N-1)/2) I(g). The alpha of
/// cfg is ignored; band, window and padding apply. Throws TruncationError when
/// the geometry does not cover the grid box.
Image fbp_reconstruct(const Sinogram& g, const ImageGrid& grid, const SpectralFilterConfig& cfg,
                      FbpPath path = FbpPath::backproject_then_filter);

/// Per-profile multiplier |k|^(2 alpha) in the offset variable (zero-padded to
/// 16 times the profile length).
Sinogram filter_profiles(const Sinogram& g, double alpha, const SpectralFilterConfig& cfg,
                         double k_nyquist);

}  // namespace radonms
