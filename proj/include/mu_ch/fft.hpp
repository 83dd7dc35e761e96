#pragma once

// Thin RAII wrapper over FFTW real transforms.
//
// Coefficients follow the basis e^{2 pi i k x} on [0,1) with the forward
// transform normalized by 1/n, so coefficient 0 is the node average. Only
// k = 0..n/2 are stored (Hermitian symmetry).

#include <fftw3.h>

#include <complex>
#include <cstddef>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <vector>

namespace mu_ch {

using Complex = std::complex<double>;

/// Half spectrum of a real periodic field: entries k = 0..n/2.
using Spectrum = std::vector<Complex>;

namespace detail {

// The FFTW planner is not re-entrant; plan execution on distinct plans is.
inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

class RealFft {
 public:
  explicit RealFft(std::size_t n) : n_(n) {
    real_ = fftw_alloc_real(n_);
    spec_ = fftw_alloc_complex(n_ / 2 + 1);
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    // FFTW_ESTIMATE keeps plan selection (and hence rounding) reproducible.
    r2c_ = fftw_plan_dft_r2c_1d(static_cast<int>(n_), real_, spec_, FFTW_ESTIMATE);
    c2r_ = fftw_plan_dft_c2r_1d(static_cast<int>(n_), spec_, real_, FFTW_ESTIMATE);
  }
  ~RealFft() {
    std::lock_guard<std::mutex> lock(fftw_planner_mutex());
    fftw_destroy_plan(c2r_);
    fftw_destroy_plan(r2c_);
    fftw_free(spec_);
    fftw_free(real_);
  }
  RealFft(const RealFft&) = delete;
  RealFft& operator=(const RealFft&) = delete;

  Spectrum forward(std::span<const double> in) {
    for (std::size_t j = 0; j < n_; ++j) real_[j] = in[j];
    fftw_execute(r2c_);
    Spectrum out(n_ / 2 + 1);
    const double scale = 1.0 / static_cast<double>(n_);
    for (std::size_t k = 0; k <= n_ / 2; ++k) {
      out[k] = Complex(spec_[k][0] * scale, spec_[k][1] * scale);
    }
    return out;
  }

  std::vector<double> inverse(std::span<const Complex> in) {
    for (std::size_t k = 0; k <= n_ / 2; ++k) {
      spec_[k][0] = in[k].real();
      spec_[k][1] = in[k].imag();
    }
    // Real signal: the DC and Nyquist coefficients carry no imaginary part.
    spec_[0][1] = 0.0;
    spec_[n_ / 2][1] = 0.0;
    fftw_execute(c2r_);
    return std::vector<double>(real_, real_ + n_);
  }

 private:
  std::size_t n_;
  double* real_ = nullptr;
  fftw_complex* spec_ = nullptr;
  fftw_plan r2c_ = nullptr;
  fftw_plan c2r_ = nullptr;
};

/// Per-thread plan cache; no state is shared between threads.
inline RealFft& fft_for(std::size_t n) {
  thread_local std::map<std::size_t, std::unique_ptr<RealFft>> cache;
  auto& slot = cache[n];
  if (!slot) slot = std::make_unique<RealFft>(n);
  return *slot;
}

}  // namespace detail

}  // namespace mu_ch
