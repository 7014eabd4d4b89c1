#include "radonms/fft.hpp"

#include <algorithm>
#include <cstring>
#include <mutex>

#include <fftw3.h>

#include "radonms/error.hpp"

namespace radonms {

namespace {
// The FFTW planner is not thread-safe; execution is.
std::mutex& planner_mutex() {
  static std::mutex m;
  return m;
}
}  // namespace

struct RealFft::Plans {
  double* real = nullptr;
  fftw_complex* spectrum = nullptr;
  fftw_plan r2c = nullptr;
  fftw_plan c2r = nullptr;
  mutable std::mutex exec;

  ~Plans() {
    std::scoped_lock lock(planner_mutex());
    if (r2c) fftw_destroy_plan(r2c);
    if (c2r) fftw_destroy_plan(c2r);
    fftw_free(real);
    fftw_free(spectrum);
  }
};

RealFft::RealFft(std::vector<int> dims) : dims_(std::move(dims)), plans_(std::make_unique<Plans>()) {
  if (dims_.empty() || dims_.size() > 3) throw InvalidArgument("RealFft supports 1 to 3 axes");
  real_size_ = 1;
  for (int d : dims_) {
    if (d < 1) throw InvalidArgument("RealFft dims must be positive");
    real_size_ *= static_cast<std::size_t>(d);
  }
  complex_size_ = real_size_ / dims_[0] * (dims_[0] / 2 + 1);
  // FFTW wants the slowest axis first.
  std::vector<int> rev(dims_.rbegin(), dims_.rend());
  std::scoped_lock lock(planner_mutex());
  plans_->real = fftw_alloc_real(real_size_);
  plans_->spectrum = fftw_alloc_complex(complex_size_);
  plans_->r2c = fftw_plan_dft_r2c(static_cast<int>(rev.size()), rev.data(), plans_->real,
                                  plans_->spectrum, FFTW_ESTIMATE);
  plans_->c2r = fftw_plan_dft_c2r(static_cast<int>(rev.size()), rev.data(), plans_->spectrum,
                                  plans_->real, FFTW_ESTIMATE);
  if (!plans_->r2c || !plans_->c2r) throw std::runtime_error("FFTW planning failed");
}

RealFft::~RealFft() = default;
RealFft::RealFft(RealFft&&) noexcept = default;
RealFft& RealFft::operator=(RealFft&&) noexcept = default;

void RealFft::forward(std::span<const double> in, std::span<std::complex<double>> out) const {
  if (in.size() != real_size_ || out.size() != complex_size_)
    throw InvalidArgument("RealFft::forward size mismatch");
  std::scoped_lock lock(plans_->exec);
  std::copy(in.begin(), in.end(), plans_->real);
  fftw_execute(plans_->r2c);
  std::memcpy(static_cast<void*>(out.data()), plans_->spectrum,
              complex_size_ * sizeof(fftw_complex));
}

void RealFft::inverse(std::span<const std::complex<double>> in, std::span<double> out) const {
  if (in.size() != complex_size_ || out.size() != real_size_)
    throw InvalidArgument("RealFft::inverse size mismatch");
  std::scoped_lock lock(plans_->exec);
  // c2r destroys its input, so work on the internal buffer.
  std::memcpy(static_cast<void*>(plans_->spectrum), in.data(),
              complex_size_ * sizeof(fftw_complex));
  fftw_execute(plans_->c2r);
  const double norm = 1.0 / static_cast<double>(real_size_);
  for (std::size_t i = 0; i < real_size_; ++i) out[i] = plans_->real[i] * norm;
}

}  // namespace radonms
