#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "mu_ch/detector.hpp"
#include "mu_ch/dynamics.hpp"
#include "mu_ch/errors.hpp"
#include "oracles.hpp"

using namespace mu_ch;

namespace {

constexpr double pi = std::numbers::pi;

PeriodicField from_poly(GridSpec g, const oracle::TrigPoly& p) {
  return PeriodicField::sample(g, [&](double x) { return p(x); });
}

PeriodicField sine(GridSpec g, double a = 1.0, double b = 0.0) {
  return PeriodicField::sample(g, [=](double x) { return a * std::sin(2 * pi * x) + b; });
}

std::vector<double> vec(const PeriodicField& f) { return {f.values().begin(), f.values().end()}; }

/// -u u_x - d_x A^{-1}(2(mu + kappa) u + u_x^2/2) with fourth-order differences
/// and the Green's kernel applied by a direct DFT.
std::vector<double> oracle_rhs(const std::vector<double>& u, double kappa) {
  const std::size_t n = u.size();
  const auto ux = oracle::fd4(u);
  double mu = 0.0;
  for (double v : u) mu += v;
  mu /= static_cast<double>(n);
  std::vector<double> src(n);
  for (std::size_t j = 0; j < n; ++j) src[j] = 2 * (mu + kappa) * u[j] + 0.5 * ux[j] * ux[j];
  const auto dxp = oracle::fd4(oracle::green_convolution(src));
  std::vector<double> out(n);
  for (std::size_t j = 0; j < n; ++j) out[j] = -u[j] * ux[j] - dxp[j];
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------
// Right-hand side

TEST(Rhs, ConstantStateIsStationary) {
  for (double kappa : {-1.0, 0.0, 2.5}) {
    EXPECT_LT(sup_norm(rhs(PeriodicField::constant(GridSpec(64), 0.8), kappa)), 1e-14);
  }
}

TEST(Rhs, SineClosedForm) {
  // -u u_x = -pi sin 4 pi x and -dP/dx = (pi/4) sin 4 pi x.
  const GridSpec g(128);
  const auto expected = PeriodicField::sample(g, [](double x) { return -0.75 * pi * std::sin(4 * pi * x); });
  EXPECT_LT(sup_norm(rhs(sine(g), 0.0) - expected), 1e-12);
}

TEST(Rhs, MeanIsExactlyConserved) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> K(-3.0, 3.0);
  const GridSpec g(128);
  for (int i = 0; i < 50; ++i) {
    const auto u = from_poly(g, oracle::random_trig(rng, 10, 1.0));
    const auto r = rhs(u, K(rng));
    EXPECT_NEAR(mean(r), 0.0, 1e-15 * sup_norm(r));
  }
}

TEST(Rhs, MatchesFiniteDifferenceGreenOracle) {
  std::mt19937_64 rng(22);
  const GridSpec g(4096);
  const auto p = oracle::random_trig(rng, 3, 1.0);
  const auto u = from_poly(g, p);
  const double kappa = 0.7;
  EXPECT_LT(oracle::max_abs_diff(vec(rhs(u, kappa)), oracle_rhs(vec(u), kappa)), 1e-6);
}

TEST(Rhs, DealiasedOutputStaysInResolvedBand) {
  std::mt19937_64 rng(23);
  const GridSpec g(96);
  const auto u = from_poly(g, oracle::random_trig(rng, 47, 1.0));
  const Spectrum s = transform(rhs(u, 0.3));
  double peak = 0.0;
  for (const auto& c : s) peak = std::max(peak, std::abs(c));
  for (std::size_t k = g.n() / 3 + 1; k < s.size(); ++k) EXPECT_LT(std::abs(s[k]), 1e-15 * peak);
}

// ---------------------------------------------------------------------------
// Stepping

TEST(Step, ConstantStateUnchanged) {
  const SimState s{0.0, PeriodicField::constant(GridSpec(32), 1.5), 0.5};
  const SimState next = step(s, 0.01);
  EXPECT_LT(sup_norm(next.u - s.u), 1e-14);
  EXPECT_DOUBLE_EQ(next.t, 0.01);
}

TEST(Step, RejectsBadStepSizes) {
  const SimState s{0.0, sine(GridSpec(32)), 0.0};
  EXPECT_THROW(step(s, 0.0), std::invalid_argument);
  EXPECT_THROW(step(s, -1e-3), std::invalid_argument);
  EXPECT_THROW(step(s, 1e-12, 1e-9), StepUnderflow);
}

TEST(Step, ForwardThenReversedFlowReturnsToStart) {
  const GridSpec g(64);
  const auto u0 = sine(g, 0.5, 0.2);
  const double kappa = 0.3, dt = 1e-3;
  auto f = [&](const PeriodicField& v) { return rhs(v, kappa); };
  auto back = [&](const PeriodicField& v) { return -rhs(v, kappa); };
  const auto u1 = rk4_step(u0, dt, f);
  EXPECT_GT(sup_norm(u1 - u0), 1e-4);
  EXPECT_LT(sup_norm(rk4_step(u1, dt, back) - u0), 1e-10);
}

TEST(Step, FourthOrderInTime) {
  const GridSpec g(64);
  const auto u0 = sine(g, 0.5, 0.1);
  const double kappa = 0.5, T = 0.1;
  auto f = [&](const PeriodicField& v) { return rhs(v, kappa); };
  auto solve = [&](int steps) {
    PeriodicField u = u0;
    for (int i = 0; i < steps; ++i) u = rk4_step(u, T / steps, f);
    return u;
  };
  const auto ref = solve(640);
  const double e1 = sup_norm(solve(10) - ref);
  const double e2 = sup_norm(solve(20) - ref);
  EXPECT_GT(e1 / e2, 12.0);
  EXPECT_LT(e1 / e2, 20.0);
}

TEST(Cfl, StepFormula) {
  EXPECT_DOUBLE_EQ(cfl_dt(2.0, 10.0, 0.01, 0.3), 0.3 * 0.01 / 2.0);
  EXPECT_DOUBLE_EQ(cfl_dt(0.5, 1000.0, 0.01, 0.3), 0.3 * 0.01 / 10.0);
  EXPECT_DOUBLE_EQ(cfl_dt(0.0, 0.0, 0.01, 0.3), 0.3 * 0.01 / 1e-8);
}

// ---------------------------------------------------------------------------
// Diagnostics

TEST(Conserved, CosineExamples) {
  const GridSpec g(64);
  const auto u = PeriodicField::sample(g, [](double x) { return std::cos(2 * pi * x); });
  const Conserved c0 = conserved(u, 0.0);
  EXPECT_NEAR(c0.H0, 0.0, 1e-15);
  EXPECT_NEAR(c0.H1, pi * pi, 1e-12);
  EXPECT_NEAR(c0.H2, 0.0, 1e-13);
  // kappa = 1: int u^2 = 1/2 and int u u_x^2 = 0.
  EXPECT_NEAR(conserved(u, 1.0).H2, 0.5, 1e-13);
}

TEST(Conserved, MatchesTrapezoidQuadratureOfClosedForms) {
  std::mt19937_64 rng(24);
  const GridSpec g(128);
  for (int i = 0; i < 10; ++i) {
    const auto p = oracle::random_trig(rng, 5, 1.0);
    const double kappa = 0.4 * i - 2.0;
    const auto u = from_poly(g, p);
    const Conserved c = conserved(u, kappa);
    const double mu = oracle::trapezoid([&](double x) { return p(x); }, 0, 1, 100000);
    const double slope = oracle::trapezoid([&](double x) { return p.dx(x) * p.dx(x); }, 0, 1, 100000);
    const double h2 = oracle::trapezoid(
        [&](double x) { return (mu + kappa) * p(x) * p(x) + 0.5 * p(x) * p.dx(x) * p.dx(x); }, 0, 1, 100000);
    EXPECT_NEAR(c.H0, mu, 1e-12);
    EXPECT_NEAR(c.H1, 0.5 * mu * mu + 0.5 * slope, 1e-9);
    EXPECT_NEAR(c.H2, h2, 1e-9);
  }
}

TEST(SlopeExtrema, SineSteepestDescentAtOneHalf) {
  const SlopeExtrema e = slope_extrema(sine(GridSpec(64)));
  EXPECT_NEAR(e.m1, -2 * pi, 1e-12);
  EXPECT_DOUBLE_EQ(e.x1, 0.5);
  EXPECT_NEAR(e.m2, 2 * pi, 1e-12);
  EXPECT_DOUBLE_EQ(e.x2, 0.0);
}

TEST(Diagnose, SineValues) {
  const Diagnostics d = diagnose(SimState{0.25, sine(GridSpec(64), 1.0, 0.5), 1.0});
  EXPECT_EQ(d.t, 0.25);
  EXPECT_NEAR(d.mu0, 0.5, 1e-15);
  EXPECT_NEAR(d.mu1, std::sqrt(2.0) * pi, 1e-12);
  EXPECT_NEAR(d.sup_u, 1.5, 1e-12);
  EXPECT_NEAR(d.osc_sup, 1.0, 1e-12);
  EXPECT_NEAR(d.osc_l2sq, 0.5, 1e-13);
  EXPECT_LT(d.tail, 1e-28);
}

TEST(ResolutionTail, DetectsEnergyNearTheDealiasingEdge) {
  const GridSpec g(96);
  // n/6 = 16 < 20 <= 32 = n/3.
  const auto u = PeriodicField::sample(g, [](double x) { return std::sin(2 * pi * x) + 0.01 * std::sin(40 * pi * x); });
  const double expected = 1e-4 * 400 / (1 + 1e-4 * 400);
  EXPECT_NEAR(diagnose(SimState{0, u, 0}).tail, expected, 1e-12);
}

TEST(Apriori, BoundsHoldOnRandomData) {
  std::mt19937_64 rng(25);
  const GridSpec g(256);
  for (int i = 0; i < 200; ++i) {
    const auto u = from_poly(g, oracle::random_trig(rng, 1 + i % 8, 1.0));
    for (const AprioriCheck& c : check_apriori_bounds(diagnose(SimState{0, u, 0}))) {
      EXPECT_TRUE(c.satisfied) << c.id << " margin " << c.margin;
    }
  }
}

TEST(Apriori, PoincareIsSharpOnTheFirstMode) {
  const auto checks = check_apriori_bounds(diagnose(SimState{0, sine(GridSpec(64), 1.0, 0.3), 0}));
  ASSERT_EQ(checks.size(), 3u);
  EXPECT_EQ(checks[2].id, "poincare");
  EXPECT_NEAR(checks[2].margin, 0.0, 1e-12);
}

TEST(Apriori, ViolationIsReported) {
  Diagnostics d;
  d.mu0 = 0.0;
  d.mu1 = 1.0;
  d.sup_u = 1.0;
  d.osc_sup = 1.0;
  d.osc_l2sq = 1.0;
  for (const AprioriCheck& c : check_apriori_bounds(d)) {
    EXPECT_FALSE(c.satisfied) << c.id;
    EXPECT_LT(c.margin, 0.0);
  }
}

// ---------------------------------------------------------------------------
// Breaking detector

TEST(Detector, SlopeThresholdAndTail) {
  DetectorOptions opt;
  EXPECT_FALSE(check_breaking(SlopeSample{0.1, -999.0, 0.5, 0.0}, opt));
  const auto ev = check_breaking(SlopeSample{0.1, -1000.0, 0.5, 0.0}, opt);
  ASSERT_TRUE(ev);
  EXPECT_EQ(ev->trigger, BreakTrigger::slope_threshold);
  const auto tail = check_breaking(SlopeSample{0.2, -40.0, 0.5, 2e-8}, opt);
  ASSERT_TRUE(tail);
  EXPECT_EQ(tail->trigger, BreakTrigger::underresolved);
  opt.enabled = false;
  EXPECT_FALSE(check_breaking(SlopeSample{0.1, -1e9, 0.5, 1.0}, opt));
}

TEST(Detector, RiccatiExtrapolation) {
  EXPECT_DOUBLE_EQ((BreakEvent{0.2, 0.5, -40.0, BreakTrigger::underresolved}.t_blowup_estimate()), 0.25);
  EXPECT_DOUBLE_EQ((BreakEvent{0.2, 0.5, 3.0, BreakTrigger::step_underflow}.t_blowup_estimate()), 0.2);
}

TEST(Detector, ScansDiagnosticStream) {
  std::vector<Diagnostics> rows(3);
  rows[0].m1 = -5;
  rows[1].m1 = -2000;
  rows[1].t = 0.3;
  rows[2].m1 = -5000;
  const auto ev = detect_breaking(std::span<const Diagnostics>(rows), DetectorOptions{});
  ASSERT_TRUE(ev);
  EXPECT_EQ(ev->t_detect, 0.3);
}

// ---------------------------------------------------------------------------
// Runs

TEST(Run, ConstantDataReachesEndUnchanged) {
  RunOptions o;
  o.t_end = 0.5;
  o.cadence = 0.1;
  const auto u0 = PeriodicField::constant(GridSpec(32), 0.7);
  const Trajectory traj = run(u0, 1.0, o);
  EXPECT_EQ(traj.termination, Termination::reached_end);
  ASSERT_EQ(traj.frames.size(), 6u);
  EXPECT_LT(sup_norm(traj.frames.back().state.u - u0), 1e-14);
}

TEST(Run, FramesLandExactlyOnCadence) {
  RunOptions o;
  o.t_end = 0.35;
  o.cadence = 0.1;
  const Trajectory traj = run(sine(GridSpec(64), 0.01), 1.0, o);
  ASSERT_EQ(traj.frames.size(), 5u);
  for (std::size_t i = 0; i + 1 < traj.frames.size(); ++i) EXPECT_EQ(traj.frames[i].state.t, 0.1 * i);
  EXPECT_EQ(traj.frames.back().state.t, 0.35);
}

TEST(Run, RejectsBadOptions) {
  RunOptions o;
  o.cadence = 0.0;
  EXPECT_THROW(run(sine(GridSpec(32)), 0.0, o), std::invalid_argument);
  o = RunOptions{};
  o.t_end = -1.0;
  EXPECT_THROW(run(sine(GridSpec(32)), 0.0, o), std::invalid_argument);
}

TEST(Run, SmallDataIsGlobalAndConservative) {
  RunOptions o;
  o.t_end = 3.0;
  o.cadence = 0.1;
  // m0 + kappa = 1.2 + 0.04 pi^2 sin(2 pi x) > 0: global by the sign condition.
  const Trajectory traj = run(sine(GridSpec(128), 0.01, 0.2), 1.0, o);
  EXPECT_EQ(traj.termination, Termination::reached_end);
  const Diagnostics& d0 = traj.frames.front().diag;
  for (const Frame& f : traj.frames) {
    EXPECT_NEAR(f.diag.mu0, d0.mu0, 1e-13);
    EXPECT_NEAR(f.diag.mu1, d0.mu1, 1e-8 * d0.mu1);
    EXPECT_NEAR(f.diag.H2, d0.H2, 1e-6 * (1 + std::abs(d0.H2)));
    for (const AprioriCheck& c : check_apriori_bounds(f.diag)) EXPECT_TRUE(c.satisfied) << c.id;
  }
}

TEST(Run, SineBreaksNearRiccatiTime) {
  // For u0 = sin 2 pi x, kappa = 0 the steepest slope follows the Riccati law
  // closely; blow-up happens near t = 0.277.
  RunOptions o;
  o.t_end = 1.0;
  const Trajectory traj = run(sine(GridSpec(512)), 0.0, o);
  EXPECT_EQ(traj.termination, Termination::breaking_detected);
  ASSERT_TRUE(traj.event);
  EXPECT_NEAR(traj.event->x, 0.5, 0.01);
  EXPECT_NEAR(traj.event->t_blowup_estimate(), 0.277, 0.01);
  EXPECT_LT(traj.event->t_detect, traj.event->t_blowup_estimate());
}

TEST(Run, StepUnderflowIsATerminationNotAnError) {
  RunOptions o;
  o.t_end = 1.0;
  o.dt_min = 1.0;
  const Trajectory traj = run(sine(GridSpec(32)), 0.0, o);
  EXPECT_EQ(traj.termination, Termination::step_underflow);
  ASSERT_TRUE(traj.event);
  EXPECT_EQ(traj.event->trigger, BreakTrigger::step_underflow);
}

TEST(Run, FilterKeepsTheMean) {
  RunOptions o;
  o.t_end = 0.2;
  o.filter_strength = 1.0;
  const auto u0 = sine(GridSpec(128), 0.3, 0.4);
  const Trajectory traj = run(u0, 0.0, o);
  for (const Frame& f : traj.frames) EXPECT_NEAR(f.diag.mu0, 0.4, 1e-14);
}
