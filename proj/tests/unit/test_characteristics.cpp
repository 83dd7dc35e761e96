#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "mu_ch/characteristics.hpp"
#include "mu_ch/dynamics.hpp"

using namespace mu_ch;

namespace {

constexpr double pi = std::numbers::pi;

PeriodicField sine(GridSpec g, double a = 1.0, double b = 0.0) {
  return PeriodicField::sample(g, [=](double x) { return a * std::sin(2 * pi * x) + b; });
}

Trajectory sine_run(double t_end, double cadence, double kappa = 0.0, double b = 0.0) {
  RunOptions o;
  o.t_end = t_end;
  o.cadence = cadence;
  return run(sine(GridSpec(256), 1.0, b), kappa, o);
}

double worst_defect(const Trajectory& traj, const std::vector<CharacteristicPath>& paths) {
  double w = 0.0;
  for (const auto& p : paths) w = std::max(w, characteristic_invariant_defect(p, traj.kappa()));
  return w;
}

}  // namespace

TEST(Seeds, UniformMidpoints) {
  const auto s = uniform_seeds(4);
  ASSERT_EQ(s.size(), 4u);
  EXPECT_DOUBLE_EQ(s[0], 0.125);
  EXPECT_DOUBLE_EQ(s[3], 0.875);
}

TEST(Interpolant, ReproducesStoredSlices) {
  const Trajectory traj = sine_run(0.05, 0.01);
  const TrajectoryInterpolant I(traj);
  const GridSpec g = traj.frames.front().state.u.grid();
  for (std::size_t i = 0; i < traj.frames.size(); ++i) {
    const auto u = synthesize(g, I.at(traj.frames[i].state.t));
    EXPECT_LT(sup_norm(u - traj.frames[i].state.u), 1e-13);
  }
}

TEST(Interpolant, HermiteInTimeIsFourthOrder) {
  // Compare midpoints of coarse slices against a run that stores them.
  const Trajectory fine = sine_run(0.1, 0.0025, 0.5);
  auto midpoint_error = [&](double cadence) {
    const Trajectory coarse = sine_run(0.1, cadence, 0.5);
    const TrajectoryInterpolant I(coarse);
    const GridSpec g = fine.frames.front().state.u.grid();
    double err = 0.0;
    for (const Frame& f : fine.frames) err = std::max(err, sup_norm(synthesize(g, I.at(f.state.t)) - f.state.u));
    return err;
  };
  const double e1 = midpoint_error(0.02);
  const double e2 = midpoint_error(0.01);
  EXPECT_GT(e1 / e2, 10.0);
  EXPECT_LT(e2, 1e-5);
}

TEST(Characteristics, ConstantFlowTranslates) {
  RunOptions o;
  o.t_end = 1.0;
  o.cadence = 0.1;
  const Trajectory traj = run(PeriodicField::constant(GridSpec(32), 0.3), 2.0, o);
  const auto paths = evolve_characteristics(traj, {0.1, 0.9});
  for (const auto& p : paths) {
    ASSERT_EQ(p.samples.size(), traj.frames.size());
    for (const auto& s : p.samples) {
      EXPECT_NEAR(s.q, wrap_unit(p.x0 + 0.3 * s.t), 1e-13);
      EXPECT_NEAR(s.qx, 1.0, 1e-13);
      EXPECT_NEAR(s.u, 0.3, 1e-14);
      EXPECT_NEAR(s.m, 0.3, 1e-12);
    }
  }
}

TEST(Characteristics, InvariantAndPositiveStretching) {
  const Trajectory traj = sine_run(0.2, 1e-3, 1.0, 0.5);
  const auto paths = evolve_characteristics(traj, uniform_seeds(16));
  EXPECT_LT(worst_defect(traj, paths), 1e-4);
  for (const auto& p : paths) {
    for (const auto& s : p.samples) EXPECT_GT(s.qx, 0.0);
  }
}

TEST(Characteristics, ParticleOrderIsPreserved) {
  const Trajectory traj = sine_run(0.2, 5e-3);
  const auto paths = evolve_characteristics(traj, uniform_seeds(32));
  for (std::size_t k = 0; k < traj.frames.size(); ++k) {
    // Unwrapped gaps between neighbours stay positive and add up to one turn.
    double total = 0.0;
    for (std::size_t i = 0; i < paths.size(); ++i) {
      const double a = paths[i].samples[k].q;
      const double b = paths[(i + 1) % paths.size()].samples[k].q;
      const double gap = wrap_unit(b - a);
      EXPECT_GT(gap, 0.0);
      total += gap;
    }
    EXPECT_NEAR(total, 1.0, 1e-12);
  }
}

TEST(Characteristics, DefectShrinksWithCadence) {
  // Well before breaking, where the spatial error is negligible, the defect
  // is set by the cubic Hermite interpolation in time.
  auto defect = [](double cadence) {
    const Trajectory traj = sine_run(0.1, cadence);
    return worst_defect(traj, evolve_characteristics(traj, uniform_seeds(8)));
  };
  const double coarse = defect(0.02);
  const double fine = defect(0.01);
  EXPECT_GT(coarse / fine, 10.0);
}

TEST(Characteristics, SteepestParticleFollowsRiccatiLaw) {
  const Trajectory traj = sine_run(0.2, 1e-3);
  const auto paths = evolve_characteristics(traj, {0.5, 0.25, 0.1});
  for (const auto& p : paths) {
    double worst = 0.0, scale = 0.0;
    for (const auto& r : slope_riccati_residual(traj, p)) worst = std::max(worst, r.residual);
    for (const auto& s : p.samples) scale = std::max(scale, s.ux * s.ux);
    EXPECT_LT(worst, 1e-3 * (1.0 + scale)) << "x0 = " << p.x0;
  }
}

TEST(Characteristics, SteepestSlopeMatchesTheClosedFormRiccatiSolution) {
  // The particle at x0 = 1/2 stays there by symmetry with u = 0, so with
  // kappa = 0, mu0 = 0 the slope obeys w' = -w^2/2 - pi^2, w(0) = -2 pi:
  // w(t) = -sqrt2 pi tan(pi t / sqrt2 + atan(sqrt2)).
  const Trajectory traj = sine_run(0.2, 1e-2);
  const auto paths = evolve_characteristics(traj, {0.5});
  for (const auto& s : paths[0].samples) {
    const double w = -std::sqrt(2.0) * pi * std::tan(pi * s.t / std::sqrt(2.0) + std::atan(std::sqrt(2.0)));
    EXPECT_NEAR(s.q, 0.5, 1e-12);
    EXPECT_NEAR(s.ux, w, 1e-6 * std::abs(w)) << "t = " << s.t;
  }
}

TEST(Characteristics, RejectsEmptyTrajectory) {
  EXPECT_THROW(TrajectoryInterpolant(Trajectory{}), std::invalid_argument);
}
