#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include "mu_ch/exact.hpp"
#include "mu_ch/field.hpp"
#include "oracles.hpp"

using namespace mu_ch;

namespace {

constexpr double pi = std::numbers::pi;

PeriodicField from_poly(GridSpec g, const oracle::TrigPoly& p) {
  return PeriodicField::sample(g, [&](double x) { return p(x); });
}

std::vector<double> vec(const PeriodicField& f) { return {f.values().begin(), f.values().end()}; }

}  // namespace

TEST(GridSpec, RejectsOddOrTinyGrids) {
  EXPECT_THROW(GridSpec(7), std::invalid_argument);
  EXPECT_THROW(GridSpec(6), std::invalid_argument);
  EXPECT_THROW(GridSpec(255), std::invalid_argument);
  EXPECT_NO_THROW(GridSpec(8));
}

TEST(GridSpec, NodesCoverUnitIntervalOnce) {
  const GridSpec g(64);
  EXPECT_EQ(g.node(0), 0.0);
  EXPECT_DOUBLE_EQ(g.spacing() * g.n(), 1.0);
  for (std::size_t j = 0; j < g.n(); ++j) {
    EXPECT_GE(g.node(j), 0.0);
    EXPECT_LT(g.node(j), 1.0);
  }
  EXPECT_EQ(GridSpec().n(), 256u);
}

TEST(PeriodicField, LengthMustMatchGrid) {
  EXPECT_THROW(PeriodicField(GridSpec(16), std::vector<double>(15)), std::invalid_argument);
  EXPECT_THROW(PeriodicField(GridSpec(16)) + PeriodicField(GridSpec(32)), std::invalid_argument);
}

TEST(Mean, CosineHasZeroMean) {
  const auto f = PeriodicField::sample(GridSpec(64), [](double x) { return std::cos(2 * pi * x); });
  EXPECT_NEAR(mean(f), 0.0, 1e-15);
}

TEST(Mean, ConstantField) { EXPECT_DOUBLE_EQ(mean(PeriodicField::constant(GridSpec(32), 3.5)), 3.5); }

TEST(Mean, PeakonProfileMeanIsTwelveThirteenths) {
  // Closed form: (1/26) int_{-1/2}^{1/2} (12 x^2 + 23) dx = (1 + 23)/26 = 12/13.
  // The node average of the kinked profile carries the exact discrete
  // correction sum_j (j/n)^2 / n = 1/12 + 1/(6 n^2), i.e. c/(13 n^2).
  for (std::size_t n : {256u, 1024u, 4096u}) {
    const double c = 1.7;
    const double node_avg = 12.0 * c / 13.0 + c / (13.0 * static_cast<double>(n * n));
    EXPECT_NEAR(mean(peakon_profile(GridSpec(n), c)), node_avg, 1e-14);
    EXPECT_NEAR(mean(peakon_profile(GridSpec(n), c)), 12.0 * c / 13.0, 1.0 / (n * n));
  }
}

TEST(Derivative, SineFirstDerivative) {
  const GridSpec g(64);
  const auto f = PeriodicField::sample(g, [](double x) { return std::sin(2 * pi * x); });
  const auto d = derivative(f, 1);
  for (std::size_t j = 0; j < g.n(); ++j) EXPECT_NEAR(d[j], 2 * pi * std::cos(2 * pi * g.node(j)), 1e-12);
}

TEST(Derivative, CosineSecondDerivative) {
  const GridSpec g(64);
  const auto f = PeriodicField::sample(g, [](double x) { return std::cos(2 * pi * x); });
  const auto d = derivative(f, 2);
  for (std::size_t j = 0; j < g.n(); ++j) EXPECT_NEAR(d[j], -4 * pi * pi * std::cos(2 * pi * g.node(j)), 1e-11);
}

TEST(Derivative, ConstantHasZeroDerivatives) {
  const auto c = PeriodicField::constant(GridSpec(32), 2.5);
  for (int order = 1; order <= 3; ++order) EXPECT_LT(sup_norm(derivative(c, order)), 1e-13);
}

TEST(Derivative, NyquistModeIsDroppedForOddOrders) {
  const GridSpec g(16);
  const auto f = PeriodicField::sample(g, [](double x) { return std::cos(16 * pi * x); });
  EXPECT_LT(sup_norm(derivative(f, 1)), 1e-12);
  EXPECT_NEAR(sup_norm(derivative(f, 2)), 256 * pi * pi, 1e-9);  // (2 pi 8)^2
}

TEST(Derivative, MatchesFourthOrderDifferencesOnFineGrid) {
  std::mt19937_64 rng(11);
  const auto p = oracle::random_smooth(rng, 6);
  const GridSpec g(2048);
  const auto d = derivative(from_poly(g, p), 1);
  const auto ref = oracle::fd4(oracle::sample(p, g.n()));
  EXPECT_LT(oracle::max_abs_diff(vec(d), ref), 1e-6);
}

TEST(Norms, SineL2AndSup) {
  const GridSpec g(128);
  const auto s = PeriodicField::sample(g, [](double x) { return std::sin(2 * pi * x); });
  EXPECT_NEAR(l2_norm(s), 1.0 / std::sqrt(2.0), 1e-14);
  const auto c2 = PeriodicField::sample(g, [](double x) { return 2 * std::cos(2 * pi * x); });
  EXPECT_NEAR(sup_norm(c2), 2.0, 1e-14);
  // slope energy of sin(2 pi x): sqrt(2) pi
  EXPECT_NEAR(l2_norm(derivative(s, 1)), std::sqrt(2.0) * pi, 1e-12);
}

TEST(Antiderivative, OfOneIsX) {
  const GridSpec g(32);
  const auto F = antiderivative_from_zero(PeriodicField::constant(g, 1.0));
  EXPECT_DOUBLE_EQ(F.slope, 1.0);
  for (std::size_t j = 0; j < g.n(); ++j) EXPECT_NEAR(F.at_node(j), g.node(j), 1e-15);
}

TEST(Antiderivative, OfCosine) {
  const GridSpec g(64);
  const auto F =
      antiderivative_from_zero(PeriodicField::sample(g, [](double x) { return std::cos(2 * pi * x); }));
  EXPECT_NEAR(F.slope, 0.0, 1e-16);
  for (std::size_t j = 0; j < g.n(); ++j) EXPECT_NEAR(F.at_node(j), std::sin(2 * pi * g.node(j)) / (2 * pi), 1e-15);
}

TEST(Antiderivative, SplitsLinearAndPeriodicParts) {
  const GridSpec g(64);
  const auto F =
      antiderivative_from_zero(PeriodicField::sample(g, [](double x) { return 1 + std::cos(2 * pi * x); }));
  EXPECT_NEAR(F.slope, 1.0, 1e-15);
  for (std::size_t j = 0; j < g.n(); ++j) EXPECT_NEAR(F.periodic[j], std::sin(2 * pi * g.node(j)) / (2 * pi), 1e-15);
}

TEST(Antiderivative, IntegralOverPeriodOfPolynomialPart) {
  // int_0^1 int_0^x (1 + cos 2 pi y) dy dx = 1/2
  const GridSpec g(64);
  const auto F =
      antiderivative_from_zero(PeriodicField::sample(g, [](double x) { return 1 + std::cos(2 * pi * x); }));
  EXPECT_NEAR(F.integral_over_period(), 0.5, 1e-15);
}

TEST(Filter, StrengthZeroIsIdentity) {
  std::mt19937_64 rng(3);
  const auto f = from_poly(GridSpec(64), oracle::random_trig(rng, 10, 1.0));
  EXPECT_EQ(apply_filter(f, 0.0), f);
}

TEST(Filter, ConstantIsUnchanged) {
  const auto c = PeriodicField::constant(GridSpec(64), -1.25);
  EXPECT_LT(sup_norm(apply_filter(c, 1.0) - c), 1e-15);
}

TEST(Filter, NyquistModeScaledByEMinus36) {
  const GridSpec g(32);
  const auto f = PeriodicField::sample(g, [](double x) { return std::cos(32 * pi * x); });
  const auto h = apply_filter(f, 1.0);
  EXPECT_NEAR(h[0], std::exp(-36.0), 1e-17);
  EXPECT_THROW(apply_filter(f, -1.0), std::invalid_argument);
}

TEST(Interpolate, ReproducesTrigPolynomialOffGrid) {
  std::mt19937_64 rng(5);
  const auto p = oracle::random_trig(rng, 5, 1.0);
  const auto f = from_poly(GridSpec(32), p);
  for (double x : {0.013, 0.5, 0.77, 0.999}) EXPECT_NEAR(interpolate(f, x), p(x), 1e-13);
}

TEST(Refine, PreservesValuesAtCoarseNodes) {
  std::mt19937_64 rng(6);
  const auto p = oracle::random_trig(rng, 7, 1.0);
  const auto f = from_poly(GridSpec(32), p);
  const auto r = refine(f, 4);
  ASSERT_EQ(r.size(), 128u);
  for (std::size_t j = 0; j < 32; ++j) EXPECT_NEAR(r[4 * j], f[j], 1e-13);
  for (std::size_t j = 0; j < 128; ++j) EXPECT_NEAR(r[j], p(r.grid().node(j)), 1e-13);
}

// ---------------------------------------------------------------------------
// Properties over random fields

TEST(FieldProperties, TransformRoundTrip) {
  std::mt19937_64 rng(101);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    const GridSpec g(8 << (trial % 6));
    std::vector<double> v(g.n());
    for (double& x : v) x = U(rng);
    const PeriodicField f(g, v);
    const auto back = synthesize(g, transform(f));
    EXPECT_LT(sup_norm(back - f), 1e-12 * (1 + sup_norm(f)));
  }
}

TEST(FieldProperties, TransformMatchesDirectSum) {
  std::mt19937_64 rng(102);
  std::uniform_real_distribution<double> U(-1, 1);
  const GridSpec g(64);
  std::vector<double> v(g.n());
  for (double& x : v) x = U(rng);
  const auto s = transform(PeriodicField(g, v));
  const auto ref = oracle::dft(v);
  for (std::size_t k = 0; k <= g.n() / 2; ++k) EXPECT_LT(std::abs(s[k] - ref[k]), 1e-14);
}

TEST(FieldProperties, DerivativeHasZeroMean) {
  std::mt19937_64 rng(103);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(128);
    for (double& x : v) x = U(rng);
    EXPECT_LT(std::abs(mean(derivative(PeriodicField(GridSpec(128), v), 1))), 1e-13);
  }
}

TEST(FieldProperties, Parseval) {
  std::mt19937_64 rng(104);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(256);
    for (double& x : v) x = U(rng);
    const auto c = oracle::dft(v);
    double e = 0.0;
    for (const auto& z : c) e += std::norm(z);
    const double l2 = l2_norm(PeriodicField(GridSpec(256), v));
    EXPECT_NEAR(l2 * l2, e, 1e-10 * e);
    EXPECT_NEAR(spectral_energy(transform(PeriodicField(GridSpec(256), v)), 256), e, 1e-10 * e);
  }
}

TEST(FieldProperties, AntiderivativeAtOneEqualsMean) {
  std::mt19937_64 rng(105);
  std::uniform_real_distribution<double> U(-1, 1);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(64);
    for (double& x : v) x = U(rng);
    const PeriodicField f(GridSpec(64), v);
    EXPECT_NEAR(antiderivative_from_zero(f).at_one(), mean(f), 1e-12);
  }
}

TEST(FieldProperties, AntiderivativeMatchesTrapezoidOfSmoothData) {
  std::mt19937_64 rng(106);
  for (int trial = 0; trial < 10; ++trial) {
    const auto p = oracle::random_smooth(rng, 5);
    const GridSpec g(64);
    const auto F = antiderivative_from_zero(from_poly(g, p));
    for (std::size_t j : {5u, 17u, 40u, 63u}) {
      const double ref = oracle::trapezoid(p, 0.0, g.node(j), 20000);
      EXPECT_NEAR(F.at_node(j), ref, 1e-8);
    }
  }
}
