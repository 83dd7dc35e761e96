#pragma once

// Periodic scalar fields on the unit circle R/Z, sampled on a uniform grid,
// with spectral differentiation, quadrature and antiderivatives.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstddef>
#include <functional>
#include <numbers>
#include <span>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mu_ch/fft.hpp"

namespace mu_ch {

inline constexpr double kTwoPi = 2.0 * std::numbers::pi;

/// Uniform grid x_j = j/n, j = 0..n-1 on [0,1).
class GridSpec {
 public:
  static constexpr std::size_t kMinPoints = 8;

  explicit GridSpec(std::size_t n = 256) : n_(n) {
    if (n_ < kMinPoints || n_ % 2 != 0) {
      throw std::invalid_argument("grid size must be even and >= 8, got " + std::to_string(n_));
    }
  }

  std::size_t n() const noexcept { return n_; }
  double spacing() const noexcept { return 1.0 / static_cast<double>(n_); }
  double node(std::size_t j) const noexcept {
    return static_cast<double>(j) / static_cast<double>(n_);
  }
  /// Highest stored wavenumber (the Nyquist mode).
  std::size_t k_max() const noexcept { return n_ / 2; }

  friend bool operator==(const GridSpec&, const GridSpec&) = default;

 private:
  std::size_t n_;
};

/// Samples of a 1-periodic real function at the nodes of a GridSpec.
class PeriodicField {
 public:
  explicit PeriodicField(GridSpec grid) : grid_(grid), values_(grid.n(), 0.0) {}

  PeriodicField(GridSpec grid, std::vector<double> values)
      : grid_(grid), values_(std::move(values)) {
    if (values_.size() != grid_.n()) {
      throw std::invalid_argument("field has " + std::to_string(values_.size()) +
                                  " samples, grid expects " + std::to_string(grid_.n()));
    }
  }

  template <class F>
  static PeriodicField sample(GridSpec grid, F&& f) {
    std::vector<double> v(grid.n());
    for (std::size_t j = 0; j < grid.n(); ++j) v[j] = f(grid.node(j));
    return PeriodicField(grid, std::move(v));
  }

  static PeriodicField constant(GridSpec grid, double c) {
    return PeriodicField(grid, std::vector<double>(grid.n(), c));
  }

  const GridSpec& grid() const noexcept { return grid_; }
  std::size_t size() const noexcept { return values_.size(); }
  std::span<const double> values() const noexcept { return values_; }
  std::span<double> values() noexcept { return values_; }
  double operator[](std::size_t j) const noexcept { return values_[j]; }
  double& operator[](std::size_t j) noexcept { return values_[j]; }

  PeriodicField& operator+=(const PeriodicField& o) {
    check_same_grid(o);
    for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += o.values_[j];
    return *this;
  }
  PeriodicField& operator-=(const PeriodicField& o) {
    check_same_grid(o);
    for (std::size_t j = 0; j < values_.size(); ++j) values_[j] -= o.values_[j];
    return *this;
  }
  PeriodicField& operator*=(double s) noexcept {
    for (double& v : values_) v *= s;
    return *this;
  }
  PeriodicField& operator+=(double c) noexcept {
    for (double& v : values_) v += c;
    return *this;
  }

  /// this += s * o
  PeriodicField& axpy(double s, const PeriodicField& o) {
    check_same_grid(o);
    for (std::size_t j = 0; j < values_.size(); ++j) values_[j] += s * o.values_[j];
    return *this;
  }

  friend PeriodicField operator+(PeriodicField a, const PeriodicField& b) { return a += b; }
  friend PeriodicField operator-(PeriodicField a, const PeriodicField& b) { return a -= b; }
  friend PeriodicField operator*(double s, PeriodicField a) { return a *= s; }
  friend PeriodicField operator*(PeriodicField a, double s) { return a *= s; }
  friend PeriodicField operator-(PeriodicField a) { return a *= -1.0; }

  /// Pointwise product.
  friend PeriodicField hadamard(const PeriodicField& a, const PeriodicField& b) {
    a.check_same_grid(b);
    PeriodicField out(a.grid_);
    for (std::size_t j = 0; j < a.values_.size(); ++j) out.values_[j] = a.values_[j] * b.values_[j];
    return out;
  }

  friend bool operator==(const PeriodicField&, const PeriodicField&) = default;

 private:
  void check_same_grid(const PeriodicField& o) const {
    if (!(grid_ == o.grid_)) throw std::invalid_argument("fields live on different grids");
  }

  GridSpec grid_;
  std::vector<double> values_;
};

// ---------------------------------------------------------------------------
// Spectral access

inline Spectrum transform(const PeriodicField& f) {
  return detail::fft_for(f.grid().n()).forward(f.values());
}

inline PeriodicField synthesize(GridSpec grid, const Spectrum& s) {
  return PeriodicField(grid, detail::fft_for(grid.n()).inverse(s));
}

/// Multiply every stored coefficient k (0..n/2) by m(k).
template <class Multiplier>
PeriodicField apply_multiplier(const PeriodicField& f, Multiplier&& m) {
  Spectrum s = transform(f);
  for (std::size_t k = 0; k < s.size(); ++k) s[k] *= m(k);
  return synthesize(f.grid(), s);
}

/// Keep |k| <= n/3 (the 2/3 dealiasing rule); higher modes are zeroed.
inline void truncate_two_thirds(Spectrum& s, std::size_t n) {
  const std::size_t cutoff = n / 3;
  for (std::size_t k = cutoff + 1; k < s.size(); ++k) s[k] = 0.0;
}

// ---------------------------------------------------------------------------
// Quadrature and norms

/// Spatial mean, i.e. the integral over one period (node average).
inline double mean(const PeriodicField& f) {
  double acc = 0.0;
  for (double v : f.values()) acc += v;
  return acc / static_cast<double>(f.size());
}

inline double l2_norm(const PeriodicField& f) {
  double acc = 0.0;
  for (double v : f.values()) acc += v * v;
  return std::sqrt(acc / static_cast<double>(f.size()));
}

inline double sup_norm(const PeriodicField& f) {
  double m = 0.0;
  for (double v : f.values()) m = std::max(m, std::abs(v));
  return m;
}

/// Sum over all 2-sided coefficients of |f_hat(k)|^2; equals l2_norm(f)^2.
inline double spectral_energy(const Spectrum& s, std::size_t n) {
  double e = std::norm(s[0]) + std::norm(s[n / 2]);
  for (std::size_t k = 1; k < n / 2; ++k) e += 2.0 * std::norm(s[k]);
  return e;
}

// ---------------------------------------------------------------------------
// Differentiation

/// Multiplier (2 pi i k)^order for stored index k; the Nyquist mode is zeroed
/// for odd orders so the result stays real and symmetric.
inline Complex derivative_multiplier(std::size_t k, std::size_t n, int order) {
  if (k == n / 2 && order % 2 != 0) return 0.0;
  const Complex ik(0.0, kTwoPi * static_cast<double>(k));
  Complex m = 1.0;
  for (int i = 0; i < order; ++i) m *= ik;
  return m;
}

inline PeriodicField derivative(const PeriodicField& f, int order = 1) {
  if (order < 1) throw std::invalid_argument("derivative order must be positive");
  const std::size_t n = f.grid().n();
  return apply_multiplier(f, [&](std::size_t k) { return derivative_multiplier(k, n, order); });
}

// ---------------------------------------------------------------------------
// Antiderivative

/// F(x) = int_0^x f(y) dy = slope * x + G(x), with G 1-periodic and G(0) = 0.
/// F is not periodic when slope (the mean of f) is non-zero, so the linear
/// part is carried separately.
struct Antiderivative {
  double slope = 0.0;
  PeriodicField periodic;

  /// F at node j.
  double at_node(std::size_t j) const { return slope * periodic.grid().node(j) + periodic[j]; }

  /// Node values of F on [0,1) (not a periodic field).
  std::vector<double> node_values() const {
    std::vector<double> v(periodic.size());
    for (std::size_t j = 0; j < v.size(); ++j) v[j] = at_node(j);
    return v;
  }

  /// F(1) = slope, since G(1) = G(0) = 0.
  double at_one() const { return slope; }

  /// int_0^1 F(x) dx
  double integral_over_period() const { return 0.5 * slope + mean(periodic); }
};

inline Antiderivative antiderivative_from_zero(const PeriodicField& f) {
  const std::size_t n = f.grid().n();
  Spectrum s = transform(f);
  const double slope = s[0].real();
  s[0] = 0.0;
  for (std::size_t k = 1; k < s.size(); ++k) {
    if (k == n / 2) {
      s[k] = 0.0;
    } else {
      s[k] /= Complex(0.0, kTwoPi * static_cast<double>(k));
    }
  }
  PeriodicField g = synthesize(f.grid(), s);
  // Fix the free constant so that G(0) = 0.
  g += -g[0];
  return Antiderivative{slope, std::move(g)};
}

// ---------------------------------------------------------------------------
// Filtering and interpolation

/// Exponential filter exp(-36 * strength * (|k|/k_max)^36).
inline PeriodicField apply_filter(const PeriodicField& f, double strength) {
  if (strength < 0.0) throw std::invalid_argument("filter strength must be non-negative");
  if (strength == 0.0) return f;
  const double kmax = static_cast<double>(f.grid().k_max());
  return apply_multiplier(f, [&](std::size_t k) {
    const double r = static_cast<double>(k) / kmax;
    return Complex(std::exp(-36.0 * strength * std::pow(r, 36.0)), 0.0);
  });
}

/// Trigonometric interpolant of a half spectrum evaluated at an arbitrary x.
inline double interpolate(const Spectrum& s, std::size_t n, double x) {
  double acc = s[0].real();
  const double theta = kTwoPi * x;
  const Complex step(std::cos(theta), std::sin(theta));
  Complex phase = step;
  for (std::size_t k = 1; k < n / 2; ++k) {
    acc += 2.0 * (s[k] * phase).real();
    phase *= step;
  }
  // Nyquist mode as cos(pi n x) keeps the interpolant real.
  acc += s[n / 2].real() * std::cos(std::numbers::pi * static_cast<double>(n) * x);
  return acc;
}

inline double interpolate(const PeriodicField& f, double x) {
  return interpolate(transform(f), f.grid().n(), x);
}

/// Zero-pad the spectrum to factor * n points (spectral refinement).
inline PeriodicField refine(const PeriodicField& f, std::size_t factor) {
  const std::size_t n = f.grid().n();
  const GridSpec fine(n * factor);
  Spectrum s = transform(f);
  Spectrum t(fine.n() / 2 + 1, Complex(0.0));
  for (std::size_t k = 0; k < n / 2; ++k) t[k] = s[k];
  // Split the Nyquist coefficient between +-n/2 to keep the interpolant real.
  if (factor > 1) t[n / 2] = 0.5 * s[n / 2];
  else t[n / 2] = s[n / 2];
  return synthesize(fine, t);
}

/// Wrap x into [0,1).
inline double wrap_unit(double x) {
  double r = x - std::floor(x);
  if (r >= 1.0) r = 0.0;
  return r;
}

}  // namespace mu_ch
