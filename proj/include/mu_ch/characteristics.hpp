#pragma once

// Particle paths q(t, x0) of a stored inviscid trajectory, the stretching
// factor q_x, and the pointwise law (m(t,q) + kappa) q_x^2 = m0(x0) + kappa.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <vector>

#include "mu_ch/dynamics.hpp"
#include "mu_ch/field.hpp"

namespace mu_ch {

struct CharacteristicSample {
  double t = 0.0;
  double q = 0.0;   // wrapped into [0,1)
  double qx = 1.0;
  double u = 0.0;   // u(t, q)
  double ux = 0.0;  // u_x(t, q)
  double m = 0.0;   // (mu - d_x^2) u at q
};

struct CharacteristicPath {
  double x0 = 0.0;
  std::vector<CharacteristicSample> samples;
};

/// Space-time interpolant of a trajectory: trigonometric in x, cubic Hermite
/// in t using u_t = rhs(u) at the stored slices.
class TrajectoryInterpolant {
 public:
  explicit TrajectoryInterpolant(const Trajectory& traj) : n_(0) {
    if (traj.frames.empty()) throw std::invalid_argument("empty trajectory");
    n_ = traj.frames.front().state.u.grid().n();
    const double kappa = traj.kappa();
    for (const Frame& f : traj.frames) {
      times_.push_back(f.state.t);
      u_hat_.push_back(transform(f.state.u));
      ut_hat_.push_back(transform(rhs(f.state.u, kappa)));
    }
  }

  std::size_t n() const { return n_; }
  const std::vector<double>& times() const { return times_; }
  const Spectrum& slice(std::size_t i) const { return u_hat_[i]; }

  /// Spectrum of u(t, .) for t inside the stored time range.
  Spectrum at(double t) const {
    if (times_.size() == 1) return u_hat_.front();
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    std::size_t i = static_cast<std::size_t>(std::distance(times_.begin(), it));
    i = std::clamp<std::size_t>(i, 1, times_.size() - 1) - 1;
    const double ta = times_[i], tb = times_[i + 1];
    const double h = tb - ta;
    const double s = (t - ta) / h;
    const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    const double h10 = s * (1.0 - s) * (1.0 - s);
    const double h01 = s * s * (3.0 - 2.0 * s);
    const double h11 = s * s * (s - 1.0);
    Spectrum out(u_hat_[i].size());
    for (std::size_t k = 0; k < out.size(); ++k) {
      out[k] = h00 * u_hat_[i][k] + h10 * h * ut_hat_[i][k] + h01 * u_hat_[i + 1][k] +
               h11 * h * ut_hat_[i + 1][k];
    }
    return out;
  }

 private:
  std::size_t n_;
  std::vector<double> times_;
  std::vector<Spectrum> u_hat_;
  std::vector<Spectrum> ut_hat_;
};

namespace detail {

inline Spectrum differentiate(const Spectrum& s, std::size_t n, int order) {
  Spectrum out(s.size());
  for (std::size_t k = 0; k < s.size(); ++k) out[k] = derivative_multiplier(k, n, order) * s[k];
  return out;
}

}  // namespace detail

/// Integrates dq/dt = u(t,q), d(log q_x)/dt = u_x(t,q) with RK4, `substeps`
/// steps per stored slice interval, and samples every path at the slice times.
inline std::vector<CharacteristicPath> evolve_characteristics(const Trajectory& traj,
                                                              const std::vector<double>& seeds,
                                                              int substeps = 2) {
  if (substeps < 1) throw std::invalid_argument("substeps must be positive");
  const TrajectoryInterpolant interp(traj);
  const std::size_t n = interp.n();
  const auto& times = interp.times();

  std::vector<double> q(seeds.begin(), seeds.end());
  std::vector<double> log_qx(seeds.size(), 0.0);
  std::vector<CharacteristicPath> paths(seeds.size());
  for (std::size_t s = 0; s < seeds.size(); ++s) paths[s].x0 = seeds[s];

  auto sample_all = [&](std::size_t i) {
    const Spectrum& u_hat = interp.slice(i);
    const Spectrum ux_hat = detail::differentiate(u_hat, n, 1);
    const Spectrum uxx_hat = detail::differentiate(u_hat, n, 2);
    const double mu = u_hat[0].real();
    for (std::size_t s = 0; s < seeds.size(); ++s) {
      CharacteristicSample smp;
      smp.t = times[i];
      smp.q = wrap_unit(q[s]);
      smp.qx = std::exp(log_qx[s]);
      smp.u = interpolate(u_hat, n, q[s]);
      smp.ux = interpolate(ux_hat, n, q[s]);
      smp.m = mu - interpolate(uxx_hat, n, q[s]);
      paths[s].samples.push_back(smp);
    }
  };

  // Velocity and strain at (t, q) for every seed.
  auto field = [&](double t, const std::vector<double>& qs, std::vector<double>& dq,
                   std::vector<double>& dl) {
    const Spectrum u_hat = interp.at(t);
    const Spectrum ux_hat = detail::differentiate(u_hat, n, 1);
    for (std::size_t s = 0; s < qs.size(); ++s) {
      dq[s] = interpolate(u_hat, n, qs[s]);
      dl[s] = interpolate(ux_hat, n, qs[s]);
    }
  };

  const std::size_t m = seeds.size();
  std::vector<double> k1q(m), k1l(m), k2q(m), k2l(m), k3q(m), k3l(m), k4q(m), k4l(m), tq(m);
  sample_all(0);
  for (std::size_t i = 0; i + 1 < times.size(); ++i) {
    const double h = (times[i + 1] - times[i]) / substeps;
    for (int sub = 0; sub < substeps; ++sub) {
      const double t = times[i] + sub * h;
      field(t, q, k1q, k1l);
      for (std::size_t s = 0; s < m; ++s) tq[s] = q[s] + 0.5 * h * k1q[s];
      field(t + 0.5 * h, tq, k2q, k2l);
      for (std::size_t s = 0; s < m; ++s) tq[s] = q[s] + 0.5 * h * k2q[s];
      field(t + 0.5 * h, tq, k3q, k3l);
      for (std::size_t s = 0; s < m; ++s) tq[s] = q[s] + h * k3q[s];
      field(t + h, tq, k4q, k4l);
      for (std::size_t s = 0; s < m; ++s) {
        q[s] += h / 6.0 * (k1q[s] + 2.0 * k2q[s] + 2.0 * k3q[s] + k4q[s]);
        log_qx[s] += h / 6.0 * (k1l[s] + 2.0 * k2l[s] + 2.0 * k3l[s] + k4l[s]);
      }
    }
    sample_all(i + 1);
  }
  return paths;
}

/// Evenly spaced seeds x0 = (i + 1/2)/count.
inline std::vector<double> uniform_seeds(std::size_t count) {
  std::vector<double> s(count);
  for (std::size_t i = 0; i < count; ++i) s[i] = (static_cast<double>(i) + 0.5) / static_cast<double>(count);
  return s;
}

/// max over samples of |(m + kappa) q_x^2 - (m0 + kappa)| / (1 + |m0 + kappa|).
inline double characteristic_invariant_defect(const CharacteristicPath& path, double kappa) {
  if (path.samples.empty()) return 0.0;
  const double c0 = path.samples.front().m + kappa;
  double worst = 0.0;
  for (const CharacteristicSample& s : path.samples) {
    const double c = (s.m + kappa) * s.qx * s.qx;
    worst = std::max(worst, std::abs(c - c0) / (1.0 + std::abs(c0)));
  }
  return worst;
}

struct RiccatiResidual {
  double t = 0.0;
  double residual = 0.0;
};

/// Along a path, w(t) = u_x(t, q(t)) should satisfy
///   w' = -w^2/2 + 2 (mu0 + kappa)(u(t,q) - mu0) - mu1^2/2.
/// w' is taken by centered differences of the samples (interior samples only).
inline std::vector<RiccatiResidual> slope_riccati_residual(const Trajectory& traj,
                                                           const CharacteristicPath& path) {
  std::vector<RiccatiResidual> out;
  if (traj.frames.empty()) return out;
  const double mu0 = traj.frames.front().diag.mu0;
  const double mu1 = traj.frames.front().diag.mu1;
  const double kappa = traj.kappa();
  const auto& s = path.samples;
  for (std::size_t i = 1; i + 1 < s.size(); ++i) {
    const double dt_b = s[i].t - s[i - 1].t;
    const double dt_f = s[i + 1].t - s[i].t;
    // Three-point derivative, valid for uneven spacing.
    const double dw = -dt_f / (dt_b * (dt_b + dt_f)) * s[i - 1].ux +
                      (dt_f - dt_b) / (dt_b * dt_f) * s[i].ux +
                      dt_b / (dt_f * (dt_b + dt_f)) * s[i + 1].ux;
    const double w = s[i].ux;
    const double model = -0.5 * w * w + 2.0 * (mu0 + kappa) * (s[i].u - mu0) - 0.5 * mu1 * mu1;
    out.push_back({s[i].t, std::abs(dw - model)});
  }
  return out;
}

}  // namespace mu_ch
