#pragma once

// The nonlocal operator A = mu - d^2/dx^2 on the circle, its inverse along two
// independent routes (Fourier multiplier and the explicit Green's-function
// formula), and the nonlocal pressure gradient dP/dx.

#include <cmath>
#include <cstddef>

#include "mu_ch/field.hpp"

namespace mu_ch {

/// Symbol of A in the e^{2 pi i k x} basis: 1 at k = 0, (2 pi k)^2 otherwise.
inline double a_symbol(std::size_t k) {
  if (k == 0) return 1.0;
  const double w = kTwoPi * static_cast<double>(k);
  return w * w;
}

inline PeriodicField apply_A(const PeriodicField& f) {
  return apply_multiplier(f, [](std::size_t k) { return Complex(a_symbol(k), 0.0); });
}

inline PeriodicField invert_A_spectral(const PeriodicField& w) {
  return apply_multiplier(w, [](std::size_t k) { return Complex(1.0 / a_symbol(k), 0.0); });
}

/// Periodic Green's function of A: g(x) = x(x-1)/2 + 13/12 on [0,1).
inline double green_function(double x) {
  const double r = wrap_unit(x);
  return 0.5 * r * (r - 1.0) + 13.0 / 12.0;
}

/// A^{-1} w from the iterated-integral representation
///   v(x) = (x^2/2 - x/2 + 13/12) mu(w) + (x - 1/2) int_0^1 int_0^y w
///          - int_0^x int_0^s w + int_0^1 int_0^y int_0^s w.
/// Each iterated integral is an antiderivative with a symbolic linear part;
/// no nested quadrature loops.
inline PeriodicField invert_A_green(const PeriodicField& w) {
  const GridSpec grid = w.grid();
  const double mu_w = mean(w);

  // F1(x) = int_0^x w = mu_w x + G1(x)
  const Antiderivative first = antiderivative_from_zero(w);
  // F2(x) = int_0^x F1 = mu_w x^2/2 + int_0^x G1
  const Antiderivative g2 = antiderivative_from_zero(first.periodic);
  // int_0^1 F1 and int_0^1 F2
  const double int_f1 = first.integral_over_period();
  const double int_f2 = mu_w / 6.0 + g2.integral_over_period();

  PeriodicField v(grid);
  for (std::size_t j = 0; j < grid.n(); ++j) {
    const double x = grid.node(j);
    const double f2 = 0.5 * mu_w * x * x + g2.at_node(j);
    v[j] = (0.5 * x * x - 0.5 * x + 13.0 / 12.0) * mu_w + (x - 0.5) * int_f1 - f2 + int_f2;
  }
  return v;
}

/// A^{-1} d^2/dx^2 w = -w + mu(w), exactly.
inline PeriodicField inv_A_dxx(const PeriodicField& w) {
  PeriodicField out = -w;
  out += mean(w);
  return out;
}

/// A^{-1} d/dx w = (x - 1/2) mu(w) - int_0^x w + int_0^1 int_0^x w.
inline PeriodicField inv_A_dx(const PeriodicField& w) {
  const GridSpec grid = w.grid();
  const double mu_w = mean(w);
  const Antiderivative f = antiderivative_from_zero(w);
  const double int_f = f.integral_over_period();
  PeriodicField out(grid);
  for (std::size_t j = 0; j < grid.n(); ++j) {
    out[j] = (grid.node(j) - 0.5) * mu_w - f.at_node(j) + int_f;
  }
  return out;
}

/// Right-hand side of the elliptic equation (mu - d_x^2) P = 2 mu(u) u + u_x^2/2 + 2 kappa u.
struct PressureSource {
  PeriodicField u;
  double kappa = 0.0;

  PeriodicField field() const {
    const PeriodicField ux = derivative(u, 1);
    PeriodicField s = 0.5 * hadamard(ux, ux);
    s.axpy(2.0 * mean(u) + 2.0 * kappa, u);
    return s;
  }
};

enum class PressureMode { spectral, quadrature };

/// dP/dx for the elliptic equation above.
///
/// spectral: d_x A^{-1} applied to the source by Fourier multipliers.
/// quadrature: the closed form
///   dP/dx = (x/2 - 1/4)(4 mu (mu + kappa) + |u_x|^2) + 1/2 int_0^1 int_0^y u_x^2
///           + 2 (mu + kappa)(int_0^1 int_0^x u - int_0^x u) - 1/2 int_0^x u_x^2.
inline PeriodicField compute_dxP(const PeriodicField& u, double kappa,
                                 PressureMode mode = PressureMode::spectral) {
  const GridSpec grid = u.grid();
  const std::size_t n = grid.n();
  if (mode == PressureMode::spectral) {
    const PeriodicField src = PressureSource{u, kappa}.field();
    return apply_multiplier(src, [&](std::size_t k) {
      return derivative_multiplier(k, n, 1) / a_symbol(k);
    });
  }

  const double mu = mean(u);
  const PeriodicField ux = derivative(u, 1);
  const PeriodicField ux2 = hadamard(ux, ux);
  const double slope_energy = mean(ux2);
  const Antiderivative int_u = antiderivative_from_zero(u);
  const Antiderivative int_ux2 = antiderivative_from_zero(ux2);
  const double dbl_u = int_u.integral_over_period();
  const double dbl_ux2 = int_ux2.integral_over_period();

  PeriodicField out(grid);
  for (std::size_t j = 0; j < n; ++j) {
    const double x = grid.node(j);
    out[j] = (0.5 * x - 0.25) * (4.0 * mu * (mu + kappa) + slope_energy) + 0.5 * dbl_ux2 +
             2.0 * (mu + kappa) * (dbl_u - int_u.at_node(j)) - 0.5 * int_ux2.at_node(j);
  }
  return out;
}

}  // namespace mu_ch
