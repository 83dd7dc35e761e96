#pragma once

// Closed-form solutions used as oracles: the periodic one-peakon traveling
// wave (kappa = 0) and multi-peakon initial profiles built from the Green's
// function of A.

#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "mu_ch/dynamics.hpp"
#include "mu_ch/field.hpp"
#include "mu_ch/helmholtz.hpp"

namespace mu_ch {

struct PeakonSpec {
  double c = 1.0;
};

struct MultipeakonSpec {
  std::vector<double> p;  // amplitudes
  std::vector<double> q;  // positions in [0,1)
};

/// Throws std::invalid_argument unless p and q have equal non-zero length and
/// the positions are distinct modulo 1.
inline void validate(const MultipeakonSpec& s) {
  if (s.p.empty() || s.p.size() != s.q.size()) {
    throw std::invalid_argument("multipeakon needs equally many amplitudes and positions");
  }
  for (std::size_t i = 0; i < s.q.size(); ++i) {
    for (std::size_t j = i + 1; j < s.q.size(); ++j) {
      const double d = wrap_unit(s.q[i] - s.q[j]);
      if (d == 0.0) throw std::invalid_argument("multipeakon positions must be distinct modulo 1");
    }
  }
}

/// phi(x) = c (12 x^2 + 23) / 26 on [-1/2, 1/2], extended periodically; the
/// peak sits at x = 1/2.
inline double peakon_value(double c, double x) {
  const double r = wrap_unit(x + 0.5) - 0.5;
  return c * (12.0 * r * r + 23.0) / 26.0;
}

inline PeriodicField peakon_profile(GridSpec grid, double c) {
  return PeriodicField::sample(grid, [c](double x) { return peakon_value(c, x); });
}

/// phi(x - c t), sampled directly.
inline PeriodicField peakon_exact(GridSpec grid, double c, double t) {
  // Reduce the shift first so large c t does not cost digits.
  const double shift = wrap_unit(c * t);
  return PeriodicField::sample(grid, [c, shift](double x) { return peakon_value(c, x - shift); });
}

/// sum_i p_i g(x - q_i).
inline PeriodicField multipeakon_field(GridSpec grid, const MultipeakonSpec& spec) {
  validate(spec);
  return PeriodicField::sample(grid, [&](double x) {
    double v = 0.0;
    for (std::size_t i = 0; i < spec.p.size(); ++i) v += spec.p[i] * green_function(x - spec.q[i]);
    return v;
  });
}

struct TranslateError {
  double t = 0.0;
  double l2_error = 0.0;
};

/// ||u(t) - phi(x - c t)||_{L2} at every frame of a peakon run.
inline std::vector<TranslateError> compare_to_translate(const Trajectory& traj, double c) {
  std::vector<TranslateError> out;
  for (const Frame& f : traj.frames) {
    const PeriodicField ref = peakon_exact(f.state.u.grid(), c, f.state.t);
    out.push_back({f.state.t, l2_norm(f.state.u - ref)});
  }
  return out;
}

}  // namespace mu_ch
