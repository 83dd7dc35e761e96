#pragma once

// Inviscid time integration: method of lines with a dealiased pseudospectral
// right-hand side, classical RK4 and a CFL-limited step, plus the conserved
// quantities and a-priori bounds monitored along a run.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mu_ch/detector.hpp"
#include "mu_ch/errors.hpp"
#include "mu_ch/field.hpp"
#include "mu_ch/helmholtz.hpp"

namespace mu_ch {

struct SimState {
  double t = 0.0;
  PeriodicField u;
  double kappa = 0.0;
};

struct SlopeExtrema {
  double m1 = 0.0;  // min u_x
  double x1 = 0.0;
  double m2 = 0.0;  // max u_x
  double x2 = 0.0;
};

struct Conserved {
  double H0 = 0.0;
  double H1 = 0.0;
  double H2 = 0.0;
};

struct Diagnostics {
  double t = 0.0;
  double H0 = 0.0;
  double H1 = 0.0;
  double H2 = 0.0;
  double mu0 = 0.0;
  double mu1 = 0.0;
  double m1 = 0.0;
  double x1 = 0.0;
  double m2 = 0.0;
  double x2 = 0.0;
  double sup_u = 0.0;
  /// max |u - mu0| and int (u - mu0)^2, for the a-priori bounds.
  double osc_sup = 0.0;
  double osc_l2sq = 0.0;
  /// Fraction of the u_x spectral energy in n/6 < |k| <= n/3.
  double tail = 0.0;
};

// ---------------------------------------------------------------------------
// Pointwise diagnostics

inline SlopeExtrema slope_extrema_of(const PeriodicField& ux) {
  SlopeExtrema s;
  std::size_t jmin = 0, jmax = 0;
  for (std::size_t j = 1; j < ux.size(); ++j) {
    if (ux[j] < ux[jmin]) jmin = j;
    if (ux[j] > ux[jmax]) jmax = j;
  }
  s.m1 = ux[jmin];
  s.x1 = ux.grid().node(jmin);
  s.m2 = ux[jmax];
  s.x2 = ux.grid().node(jmax);
  return s;
}

inline SlopeExtrema slope_extrema(const PeriodicField& u) { return slope_extrema_of(derivative(u, 1)); }

inline Conserved conserved(const PeriodicField& u, double kappa) {
  const PeriodicField ux = derivative(u, 1);
  const double mu = mean(u);
  const double slope_energy = mean(hadamard(ux, ux));
  double h2 = 0.0;
  for (std::size_t j = 0; j < u.size(); ++j) {
    h2 += (mu + kappa) * u[j] * u[j] + 0.5 * u[j] * ux[j] * ux[j];
  }
  h2 /= static_cast<double>(u.size());
  return {mu, 0.5 * mu * mu + 0.5 * slope_energy, h2};
}

/// Fraction of the spectral energy of u_x carried by n/6 < k <= n/3.
inline double resolution_tail(const Spectrum& u_hat, std::size_t n) {
  double total = 0.0, tail = 0.0;
  const std::size_t lo = n / 6, hi = n / 3;
  for (std::size_t k = 1; k < n / 2; ++k) {
    const double e = std::norm(u_hat[k]) * static_cast<double>(k * k);
    total += e;
    if (k > lo && k <= hi) tail += e;
  }
  return total > 0.0 ? tail / total : 0.0;
}

inline Diagnostics diagnose(const SimState& s) {
  const PeriodicField& u = s.u;
  const std::size_t n = u.grid().n();
  const Spectrum u_hat = transform(u);
  const PeriodicField ux =
      apply_multiplier(u, [&](std::size_t k) { return derivative_multiplier(k, n, 1); });
  const Conserved c = conserved(u, s.kappa);
  const SlopeExtrema e = slope_extrema_of(ux);

  Diagnostics d;
  d.t = s.t;
  d.H0 = c.H0;
  d.H1 = c.H1;
  d.H2 = c.H2;
  d.mu0 = c.H0;
  d.mu1 = l2_norm(ux);
  d.m1 = e.m1;
  d.x1 = e.x1;
  d.m2 = e.m2;
  d.x2 = e.x2;
  d.sup_u = sup_norm(u);
  double osc = 0.0, osc2 = 0.0;
  for (double v : u.values()) {
    osc = std::max(osc, std::abs(v - d.mu0));
    osc2 += (v - d.mu0) * (v - d.mu0);
  }
  d.osc_sup = osc;
  d.osc_l2sq = osc2 / static_cast<double>(n);
  d.tail = resolution_tail(u_hat, n);
  return d;
}

struct AprioriCheck {
  std::string id;
  bool satisfied = false;
  double margin = 0.0;  // bound - observed; negative when violated
};

/// Amplitude bound, oscillation bound and Poincare bound for one state.
inline std::vector<AprioriCheck> check_apriori_bounds(const Diagnostics& d, double tol = 1e-8) {
  const double sqrt3 = std::numbers::sqrt3;
  const double pi = std::numbers::pi;
  std::vector<AprioriCheck> out;
  const double b1 = std::abs(d.mu0) + sqrt3 / 6.0 * d.mu1;
  out.push_back({"sup_amplitude", d.sup_u <= b1 + tol, b1 - d.sup_u});
  const double b2 = d.mu1 * d.mu1 / 12.0;
  const double o2 = d.osc_sup * d.osc_sup;
  out.push_back({"sup_oscillation", o2 <= b2 + tol, b2 - o2});
  const double b3 = d.mu1 * d.mu1 / (4.0 * pi * pi);
  out.push_back({"poincare", d.osc_l2sq <= b3 + tol, b3 - d.osc_l2sq});
  return out;
}

// ---------------------------------------------------------------------------
// Right-hand side

/// u_t = -(u^2/2)_x - d_x A^{-1}(u_x^2/2) - (2 mu + 2 kappa) d_x A^{-1} u.
///
/// This is -u u_x - dP/dx written in conservative form. Inputs and products
/// are truncated to |k| <= n/3 (2/3 rule) and so is the output, which keeps
/// the k = 0 coefficient exactly zero.
inline PeriodicField rhs(const PeriodicField& u, double kappa) {
  const GridSpec grid = u.grid();
  const std::size_t n = grid.n();
  Spectrum u_hat = transform(u);
  const double mu = u_hat[0].real();
  truncate_two_thirds(u_hat, n);

  Spectrum ux_hat(u_hat.size());
  for (std::size_t k = 0; k < u_hat.size(); ++k) ux_hat[k] = derivative_multiplier(k, n, 1) * u_hat[k];
  const PeriodicField ud = synthesize(grid, u_hat);
  const PeriodicField uxd = synthesize(grid, ux_hat);

  PeriodicField half_u2(grid), half_ux2(grid);
  for (std::size_t j = 0; j < n; ++j) {
    half_u2[j] = 0.5 * ud[j] * ud[j];
    half_ux2[j] = 0.5 * uxd[j] * uxd[j];
  }
  const Spectrum a_hat = transform(half_u2);
  const Spectrum b_hat = transform(half_ux2);

  const double lin = 2.0 * mu + 2.0 * kappa;
  Spectrum out(u_hat.size(), Complex(0.0));
  const std::size_t cutoff = n / 3;
  for (std::size_t k = 1; k <= cutoff && k < out.size(); ++k) {
    const Complex d1 = derivative_multiplier(k, n, 1);
    const double inv_a = 1.0 / a_symbol(k);
    out[k] = -d1 * a_hat[k] - d1 * inv_a * (b_hat[k] + lin * u_hat[k]);
  }
  return synthesize(grid, out);
}

// ---------------------------------------------------------------------------
// Time stepping

/// One classical RK4 step of u' = f(u).
template <class F>
PeriodicField rk4_step(const PeriodicField& u, double dt, F&& f) {
  const PeriodicField k1 = f(u);
  PeriodicField tmp = u;
  tmp.axpy(0.5 * dt, k1);
  const PeriodicField k2 = f(tmp);
  tmp = u;
  tmp.axpy(0.5 * dt, k2);
  const PeriodicField k3 = f(tmp);
  tmp = u;
  tmp.axpy(dt, k3);
  const PeriodicField k4 = f(tmp);
  PeriodicField out = u;
  out.axpy(dt / 6.0, k1);
  out.axpy(dt / 3.0, k2);
  out.axpy(dt / 3.0, k3);
  out.axpy(dt / 6.0, k4);
  return out;
}

inline SimState step(const SimState& s, double dt, double dt_min = 1e-9) {
  if (!(dt > 0.0)) throw std::invalid_argument("step size must be positive");
  if (dt < dt_min) throw StepUnderflow(dt, dt_min);
  auto f = [&](const PeriodicField& v) { return rhs(v, s.kappa); };
  return SimState{s.t + dt, rk4_step(s.u, dt, f), s.kappa};
}

/// dt = C dx / max(|u|_inf, |u_x|_inf dx, 1e-8).
inline double cfl_dt(double sup_u, double sup_ux, double dx, double cfl) {
  const double speed = std::max({sup_u, sup_ux * dx, 1e-8});
  return cfl * dx / speed;
}

inline bool all_finite(const PeriodicField& f) {
  return std::all_of(f.values().begin(), f.values().end(), [](double v) { return std::isfinite(v); });
}

// ---------------------------------------------------------------------------
// Runs

enum class Termination { reached_end, breaking_detected, step_underflow };

inline std::string_view to_string(Termination t) {
  switch (t) {
    case Termination::reached_end: return "reached_end";
    case Termination::breaking_detected: return "breaking_detected";
    case Termination::step_underflow: return "step_underflow";
  }
  return "unknown";
}

struct Frame {
  SimState state;
  Diagnostics diag;
};

struct Trajectory {
  std::vector<Frame> frames;
  Termination termination = Termination::reached_end;
  std::optional<BreakEvent> event;
  std::size_t steps = 0;

  double kappa() const { return frames.empty() ? 0.0 : frames.front().state.kappa; }
  std::vector<Diagnostics> diagnostics() const {
    std::vector<Diagnostics> d;
    d.reserve(frames.size());
    for (const Frame& f : frames) d.push_back(f.diag);
    return d;
  }
};

struct RunOptions {
  double t_end = 1.0;
  double cfl = 0.3;
  double cadence = 0.01;
  double dt_min = 1e-9;
  /// Exponential filter applied after every step; 0 disables it.
  double filter_strength = 0.0;
  DetectorOptions detector;
};

namespace detail {

struct StepProbe {
  double sup_u = 0.0;
  double sup_ux = 0.0;
  double m1 = 0.0;
  double x1 = 0.0;
  double tail = 0.0;
};

inline StepProbe probe(const PeriodicField& u) {
  const std::size_t n = u.grid().n();
  Spectrum u_hat = transform(u);
  StepProbe p;
  p.tail = resolution_tail(u_hat, n);
  for (std::size_t k = 0; k < u_hat.size(); ++k) u_hat[k] *= derivative_multiplier(k, n, 1);
  const PeriodicField ux = synthesize(u.grid(), u_hat);
  const SlopeExtrema e = slope_extrema_of(ux);
  p.m1 = e.m1;
  p.x1 = e.x1;
  p.sup_ux = std::max(std::abs(e.m1), std::abs(e.m2));
  p.sup_u = sup_norm(u);
  return p;
}

}  // namespace detail

/// Integrates u' = advance-defined flow from u0 on [0, t_end].
///
/// `advance(u, h)` returns the state after one step of size h. Frames are
/// recorded at t = k * cadence (hit exactly) and at t_end; the run stops early
/// when the breaking detector fires or the step falls below dt_min. Neither is
/// an error: both are recorded as the termination reason.
template <class Advance>
Trajectory integrate(const PeriodicField& u0, double kappa, const RunOptions& opt, Advance&& advance) {
  if (!(opt.t_end >= 0.0)) throw std::invalid_argument("t_end must be non-negative");
  if (!(opt.cadence > 0.0)) throw std::invalid_argument("cadence must be positive");
  if (!(opt.cfl > 0.0)) throw std::invalid_argument("cfl must be positive");

  Trajectory traj;
  SimState s{0.0, u0, kappa};
  auto record = [&]() { traj.frames.push_back(Frame{s, diagnose(s)}); };
  record();

  const double dx = u0.grid().spacing();
  std::size_t k_out = 1;
  while (s.t < opt.t_end) {
    const detail::StepProbe p = detail::probe(s.u);
    if (auto ev = check_breaking(SlopeSample{s.t, p.m1, p.x1, p.tail}, opt.detector)) {
      if (traj.frames.back().state.t < s.t) record();
      traj.termination = Termination::breaking_detected;
      traj.event = ev;
      return traj;
    }
    const double dt = cfl_dt(p.sup_u, p.sup_ux, dx, opt.cfl);
    if (dt < opt.dt_min) {
      if (traj.frames.back().state.t < s.t) record();
      traj.termination = Termination::step_underflow;
      traj.event = BreakEvent{s.t, p.x1, p.m1, BreakTrigger::step_underflow};
      return traj;
    }
    const double t_next = std::min(static_cast<double>(k_out) * opt.cadence, opt.t_end);
    const bool lands = dt >= t_next - s.t;
    const double h = lands ? t_next - s.t : dt;

    PeriodicField next = advance(s.u, h);
    if (opt.filter_strength > 0.0) next = apply_filter(next, opt.filter_strength);
    if (!all_finite(next)) {
      if (traj.frames.back().state.t < s.t) record();
      traj.termination = Termination::step_underflow;
      traj.event = BreakEvent{s.t, p.x1, p.m1, BreakTrigger::step_underflow};
      return traj;
    }
    s.u = std::move(next);
    s.t = lands ? t_next : s.t + h;
    ++traj.steps;
    if (lands) {
      record();
      ++k_out;
    }
  }
  traj.termination = Termination::reached_end;
  return traj;
}

/// Inviscid run from u0.
inline Trajectory run(const PeriodicField& u0, double kappa, const RunOptions& opt) {
  return integrate(u0, kappa, opt, [kappa](const PeriodicField& u, double h) {
    return rk4_step(u, h, [kappa](const PeriodicField& v) { return rhs(v, kappa); });
  });
}

}  // namespace mu_ch
