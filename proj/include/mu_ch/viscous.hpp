#pragma once

// Vanishing-viscosity approximation: mollified initial data, the equation with
// an added eps u_xx term (integrated exactly in Fourier space), and the
// monitors that check its energy dissipation, one-sided slope bound and
// space-time integrability along a run.

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <future>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <vector>

#include "mu_ch/dynamics.hpp"
#include "mu_ch/field.hpp"

namespace mu_ch {

// ---------------------------------------------------------------------------
// Mollifier

/// exp(-1/(1-x^2)) on (-1,1), zero elsewhere (unnormalized).
inline double bump(double x) {
  const double r = 1.0 - x * x;
  return r > 0.0 ? std::exp(-1.0 / r) : 0.0;
}

/// Z with Z * int bump = 1, by adaptive Gauss-Kronrod quadrature (once).
inline double mollifier_normalization() {
  static const double z = [] {
    const double integral = boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
        bump, -1.0, 1.0, 15, 1e-14);
    return 1.0 / integral;
  }();
  return z;
}

/// phi_eps(x) = phi(x/eps)/eps with phi = Z bump.
inline double mollifier(double x, double eps) {
  return mollifier_normalization() * bump(x / eps) / eps;
}

/// Periodic convolution with phi_eps by direct quadrature on the grid.
///
/// The discrete weights phi_eps(m dx) dx are renormalized to sum to one, so the
/// mean is kept exactly and no Fourier mode is amplified.
inline PeriodicField mollify(const PeriodicField& u, double eps) {
  if (!(eps > 0.0) || !(eps < 0.25)) throw std::invalid_argument("mollifier scale must lie in (0, 1/4)");
  const std::size_t n = u.grid().n();
  const double dx = u.grid().spacing();
  const auto reach = static_cast<std::ptrdiff_t>(std::ceil(eps / dx));
  std::vector<double> w;
  double total = 0.0;
  for (std::ptrdiff_t m = -reach; m <= reach; ++m) {
    const double v = mollifier(static_cast<double>(m) * dx, eps) * dx;
    w.push_back(v);
    total += v;
  }
  for (double& v : w) v /= total;

  PeriodicField out(u.grid());
  const auto sn = static_cast<std::ptrdiff_t>(n);
  for (std::ptrdiff_t j = 0; j < sn; ++j) {
    double acc = 0.0;
    for (std::ptrdiff_t m = -reach; m <= reach; ++m) {
      std::ptrdiff_t idx = (j - m) % sn;
      if (idx < 0) idx += sn;
      acc += w[static_cast<std::size_t>(m + reach)] * u[static_cast<std::size_t>(idx)];
    }
    out[static_cast<std::size_t>(j)] = acc;
  }
  return out;
}

// ---------------------------------------------------------------------------
// Viscous right-hand side and step

inline PeriodicField rhs_viscous(const PeriodicField& u, double kappa, double eps) {
  if (eps < 0.0) throw std::invalid_argument("viscosity must be non-negative");
  PeriodicField r = rhs(u, kappa);
  if (eps == 0.0) return r;
  r.axpy(eps, derivative(u, 2));
  return r;
}

/// Heat semigroup exp(eps h d_x^2) applied in Fourier space.
inline PeriodicField heat_flow(const PeriodicField& f, double eps, double h) {
  if (eps == 0.0 || h == 0.0) return f;
  return apply_multiplier(f, [&](std::size_t k) {
    const double w = kTwoPi * static_cast<double>(k);
    return Complex(std::exp(-eps * w * w * h), 0.0);
  });
}

/// Integrating-factor RK4 (Lawson): the eps u_xx part is solved exactly and
/// RK4 is applied to the remaining nonlinear terms.
inline PeriodicField viscous_step(const PeriodicField& u, double h, double kappa, double eps) {
  auto N = [kappa](const PeriodicField& v) { return rhs(v, kappa); };
  if (eps == 0.0) return rk4_step(u, h, N);
  const PeriodicField k1 = N(u);
  PeriodicField a = u;
  a.axpy(0.5 * h, k1);
  const PeriodicField u2 = heat_flow(a, eps, 0.5 * h);
  const PeriodicField k2 = N(u2);
  const PeriodicField eu_half = heat_flow(u, eps, 0.5 * h);
  PeriodicField u3 = eu_half;
  u3.axpy(0.5 * h, k2);
  const PeriodicField k3 = N(u3);
  PeriodicField u4 = heat_flow(u, eps, h);
  u4.axpy(h, heat_flow(k3, eps, 0.5 * h));
  const PeriodicField k4 = N(u4);

  PeriodicField mid = k2 + k3;
  PeriodicField out = heat_flow(u, eps, h);
  out.axpy(h / 6.0, heat_flow(k1, eps, h));
  out.axpy(h / 3.0, heat_flow(mid, eps, 0.5 * h));
  out.axpy(h / 6.0, k4);
  return out;
}

// ---------------------------------------------------------------------------
// Runs and monitors

struct ViscousConfig {
  double epsilon = 1e-2;
  /// Mollifier scale; 0 means "same as epsilon".
  double mollifier_scale = 0.0;
  double alpha = 0.5;
  double t_lo = 0.1;
  RunOptions run;

  double scale() const { return mollifier_scale > 0.0 ? mollifier_scale : epsilon; }
};

inline void validate(const ViscousConfig& c) {
  if (!(c.epsilon > 0.0)) throw std::invalid_argument("epsilon must be positive");
  if (!(c.scale() < 0.25)) throw std::invalid_argument("mollifier scale must be below 1/4");
  if (!(c.alpha > 0.0 && c.alpha < 1.0)) throw std::invalid_argument("alpha must lie in (0,1)");
  if (!(c.t_lo > 0.0)) throw std::invalid_argument("t_lo must be positive");
}

/// sqrt(2 (mu0+kappa)^2 + (7/6) mu1^2)
inline double oleinik_constant(double mu0, double mu1, double kappa) {
  return std::sqrt(2.0 * (mu0 + kappa) * (mu0 + kappa) + 7.0 / 6.0 * mu1 * mu1);
}

struct ViscousSample {
  double t = 0.0;
  double slope_energy = 0.0;  // int q^2, q = u_x
  double dissipation = 0.0;   // eps int q_x^2
  /// max_x (q - 2/t - L0); NaN at t = 0 where the bound is vacuous.
  double oleinik_margin = std::numeric_limits<double>::quiet_NaN();
  double integrability = 0.0;  // running int_0^t int |q|^{2+alpha}
};

struct ViscousMonitors {
  std::vector<ViscousSample> series;
  double L0 = 0.0;
  double alpha = 0.5;
  double epsilon = 0.0;
};

inline double power_integral(const PeriodicField& q, double p) {
  double acc = 0.0;
  for (double v : q.values()) acc += std::pow(std::abs(v), p);
  return acc / static_cast<double>(q.size());
}

inline ViscousMonitors compute_monitors(const Trajectory& traj, double eps, double alpha) {
  ViscousMonitors mon;
  mon.alpha = alpha;
  mon.epsilon = eps;
  if (traj.frames.empty()) return mon;
  const Diagnostics& d0 = traj.frames.front().diag;
  mon.L0 = oleinik_constant(d0.mu0, d0.mu1, traj.kappa());
  double running = 0.0, prev_t = 0.0, prev_density = 0.0;
  for (std::size_t i = 0; i < traj.frames.size(); ++i) {
    const Frame& f = traj.frames[i];
    const PeriodicField q = derivative(f.state.u, 1);
    const PeriodicField qx = derivative(f.state.u, 2);
    ViscousSample s;
    s.t = f.state.t;
    s.slope_energy = mean(hadamard(q, q));
    s.dissipation = eps * mean(hadamard(qx, qx));
    if (s.t > 0.0) {
      const double qmax = *std::max_element(q.values().begin(), q.values().end());
      s.oleinik_margin = qmax - 2.0 / s.t - mon.L0;
    }
    const double density = power_integral(q, 2.0 + alpha);
    if (i > 0) running += 0.5 * (s.t - prev_t) * (density + prev_density);
    s.integrability = running;
    prev_t = s.t;
    prev_density = density;
    mon.series.push_back(s);
  }
  return mon;
}

struct ViscousRun {
  PeriodicField initial;  // mollified data
  Trajectory trajectory;
  ViscousMonitors monitors;
};

inline Trajectory integrate_viscous(const PeriodicField& u0, double kappa, double eps, RunOptions opt) {
  opt.detector.enabled = false;
  return integrate(u0, kappa, opt, [kappa, eps](const PeriodicField& u, double h) {
    return viscous_step(u, h, kappa, eps);
  });
}

inline ViscousRun run_viscous(const PeriodicField& u0, double kappa, const ViscousConfig& cfg) {
  validate(cfg);
  PeriodicField start = mollify(u0, cfg.scale());
  Trajectory traj = integrate_viscous(start, kappa, cfg.epsilon, cfg.run);
  ViscousMonitors mon = compute_monitors(traj, cfg.epsilon, cfg.alpha);
  return ViscousRun{std::move(start), std::move(traj), std::move(mon)};
}

struct DissipationDefect {
  double max_defect = 0.0;
  double t_worst = 0.0;
};

/// d/dt of int q^2 against -2 eps int q_x^2 at interior frames, relative to
/// 1 + 2 eps int q_x^2. The derivative is that of the quartic through the five
/// nearest frames (the centered five-point stencil away from the ends).
inline DissipationDefect monitor_dissipation(const ViscousMonitors& mon) {
  DissipationDefect out;
  const auto& s = mon.series;
  if (s.size() < 3) return out;
  const std::size_t width = std::min<std::size_t>(5, s.size());
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const std::size_t lo = std::min(i > width / 2 ? i - width / 2 : 0, s.size() - width);
    double de = 0.0;
    for (std::size_t j = lo; j < lo + width; ++j) {
      // Derivative at t_i of the Lagrange basis polynomial for node j.
      double w = 0.0;
      if (j == i) {
        for (std::size_t k = lo; k < lo + width; ++k) {
          if (k != i) w += 1.0 / (s[i].t - s[k].t);
        }
      } else {
        w = 1.0 / (s[j].t - s[i].t);
        for (std::size_t k = lo; k < lo + width; ++k) {
          if (k != i && k != j) w *= (s[i].t - s[k].t) / (s[j].t - s[k].t);
        }
      }
      de += w * s[j].slope_energy;
    }
    const double defect = std::abs(de + 2.0 * s[i].dissipation) / (1.0 + 2.0 * s[i].dissipation);
    if (defect > out.max_defect) out = {defect, s[i].t};
  }
  return out;
}

inline DissipationDefect monitor_dissipation(const Trajectory& traj, double eps) {
  return monitor_dissipation(compute_monitors(traj, eps, 0.5));
}

struct OleinikReport {
  double L0 = 0.0;
  double worst_margin = -std::numeric_limits<double>::infinity();
  double t_worst = 0.0;
  bool pass() const { return worst_margin <= 1e-8; }
};

/// Worst max_x (u_x - 2/t - L0) over frames with t in [t_lo, t_hi].
inline OleinikReport monitor_oleinik(const ViscousMonitors& mon, double t_lo,
                                     double t_hi = std::numeric_limits<double>::infinity()) {
  OleinikReport r;
  r.L0 = mon.L0;
  for (const ViscousSample& s : mon.series) {
    if (s.t < t_lo || s.t > t_hi) continue;
    if (s.oleinik_margin > r.worst_margin) {
      r.worst_margin = s.oleinik_margin;
      r.t_worst = s.t;
    }
  }
  return r;
}

inline OleinikReport monitor_oleinik(const Trajectory& traj, double t_lo,
                                     double t_hi = std::numeric_limits<double>::infinity()) {
  return monitor_oleinik(compute_monitors(traj, 0.0, 0.5), t_lo, t_hi);
}

/// int_0^T int |u_x|^{2+alpha} dx dt over the whole trajectory (trapezoid in t).
inline double monitor_integrability(const Trajectory& traj, double alpha) {
  return compute_monitors(traj, 0.0, alpha).series.back().integrability;
}

// ---------------------------------------------------------------------------
// Epsilon sweep

struct SweepRow {
  double t = 0.0;
  double eps_coarse = 0.0;
  double eps_fine = 0.0;
  double l2_difference = 0.0;
};

struct SweepResult {
  std::vector<double> epsilons;
  std::vector<double> times;
  /// fields[i][j]: u_{eps_i}(times[j])
  std::vector<std::vector<PeriodicField>> fields;
  std::vector<SweepRow> table;
  /// max over eps and times of |mu(u_eps(t)) - mu(u0)|
  double mean_spread = 0.0;
};

/// Runs the viscous problem up to each requested time and records the field there.
inline std::vector<PeriodicField> viscous_fields_at(const PeriodicField& u0, double kappa,
                                                    const ViscousConfig& cfg,
                                                    const std::vector<double>& times) {
  validate(cfg);
  std::vector<PeriodicField> out;
  PeriodicField u = mollify(u0, cfg.scale());
  double t = 0.0;
  for (double target : times) {
    if (target < t) throw std::invalid_argument("sweep times must be increasing");
    if (target > t) {
      RunOptions opt = cfg.run;
      opt.t_end = target - t;
      opt.cadence = std::min(opt.cadence, opt.t_end);
      Trajectory traj = integrate_viscous(u, kappa, cfg.epsilon, opt);
      u = traj.frames.back().state.u;
      t = target;
    }
    out.push_back(u);
  }
  return out;
}

/// Runs every epsilon (optionally in parallel, each with its own state) and
/// tabulates ||u_{eps_i}(t) - u_{eps_{i+1}}(t)||_{L2}.
inline SweepResult epsilon_sweep(const PeriodicField& u0, double kappa, const ViscousConfig& base,
                                 const std::vector<double>& eps_list, std::vector<double> times,
                                 bool parallel = false) {
  if (eps_list.size() < 2) throw std::invalid_argument("epsilon sweep needs at least two values");
  for (std::size_t i = 1; i < eps_list.size(); ++i) {
    if (!(eps_list[i] < eps_list[i - 1])) throw std::invalid_argument("epsilons must be strictly decreasing");
  }
  std::sort(times.begin(), times.end());

  SweepResult r;
  r.epsilons = eps_list;
  r.times = times;
  auto job = [&](double eps) {
    ViscousConfig cfg = base;
    cfg.epsilon = eps;
    return viscous_fields_at(u0, kappa, cfg, times);
  };
  if (parallel) {
    std::vector<std::future<std::vector<PeriodicField>>> futures;
    for (double eps : eps_list) futures.push_back(std::async(std::launch::async, job, eps));
    for (auto& f : futures) r.fields.push_back(f.get());
  } else {
    for (double eps : eps_list) r.fields.push_back(job(eps));
  }

  const double mu_ref = mean(u0);
  for (const auto& row : r.fields) {
    for (const PeriodicField& f : row) r.mean_spread = std::max(r.mean_spread, std::abs(mean(f) - mu_ref));
  }
  for (std::size_t j = 0; j < times.size(); ++j) {
    for (std::size_t i = 0; i + 1 < eps_list.size(); ++i) {
      r.table.push_back({times[j], eps_list[i], eps_list[i + 1], l2_norm(r.fields[i][j] - r.fields[i + 1][j])});
    }
  }
  return r;
}

}  // namespace mu_ch
