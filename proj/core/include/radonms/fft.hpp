#pragma once

#include <complex>
#include <cstddef>
#include <memory>
#include <span>
#include <vector>

namespace radonms {

/// Real-to-complex FFT over a 1D, 2D or 3D array whose axis 0 varies fastest
/// (the layout of Image). Plans are built with FFTW_ESTIMATE, so results do not
/// depend on timing. The half-spectrum is stored along axis 0: dims[0] / 2 + 1
/// entries, then the other axes in full.
class RealFft {
 public:
  explicit RealFft(std::vector<int> dims);
  ~RealFft();
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;
  RealFft(RealFft&&) noexcept;
  RealFft& operator=(RealFft&&) noexcept;

  const std::vector<int>& dims() const { return dims_; }
  std::size_t real_size() const { return real_size_; }
  std::size_t complex_size() const { return complex_size_; }

  void forward(std::span<const double> in, std::span<std::complex<double>> out) const;
  /// Inverse including the 1/size normalization.
  void inverse(std::span<const std::complex<double>> in, std::span<double> out) const;

 private:
  struct Plans;
  std::vector<int> dims_;
  std::size_t real_size_ = 0;
  std::size_t complex_size_ = 0;
  std::unique_ptr<Plans> plans_;
};

/// Signed integer frequency index for DFT bin m of an n-point transform.
inline int signed_frequency(int m, int n) { return m <= n / 2 ? m : m - n; }

}  // namespace radonms
