#pragma once

// Sufficient conditions for wave breaking and for global existence, evaluated
// on concrete initial data, with the explicit life-span bounds that go with
// the blow-up criteria.
//
// All strict inequalities are compared exactly (no tolerance); every
// certificate also carries a margin (slack of its binding condition, positive
// when the condition holds) so near-threshold cases stay visible.

#include <boost/math/tools/minima.hpp>

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "mu_ch/dynamics.hpp"
#include "mu_ch/errors.hpp"
#include "mu_ch/field.hpp"

namespace mu_ch {

enum class CriterionId { blowup_a, blowup_b, blowup_c, blowup_d, global_sign, global_h3 };

inline constexpr std::array<CriterionId, 6> kAllCriteria = {
    CriterionId::blowup_a, CriterionId::blowup_b,    CriterionId::blowup_c,
    CriterionId::blowup_d, CriterionId::global_sign, CriterionId::global_h3};

inline std::string_view to_string(CriterionId id) {
  switch (id) {
    case CriterionId::blowup_a: return "BlowupA";
    case CriterionId::blowup_b: return "BlowupB";
    case CriterionId::blowup_c: return "BlowupC";
    case CriterionId::blowup_d: return "BlowupD";
    case CriterionId::global_sign: return "GlobalSign";
    case CriterionId::global_h3: return "GlobalH3";
  }
  return "unknown";
}

inline bool is_blowup(CriterionId id) {
  return id == CriterionId::blowup_a || id == CriterionId::blowup_b ||
         id == CriterionId::blowup_c || id == CriterionId::blowup_d;
}

/// Hypothesis in words, stored with each certificate.
inline std::string_view statement(CriterionId id) {
  switch (id) {
    case CriterionId::blowup_a:
      return "sqrt(3)/pi |mu0+kappa| < mu1 => breaking; T <= inf over alpha of "
             "6/(1-6a) + 4 pi^2 a (1+|V0|)/(6 pi^2 a mu1^4 - 3 (mu0+kappa)^2 mu1^2)";
    case CriterionId::blowup_b:
      return "sqrt(3)/pi |mu0+kappa| >= mu1 and inf u0' < -K, "
             "K = sqrt(2 mu1 (sqrt(3)/3 |mu0+kappa| - mu1/2)) => T <= inf u0'/(K^2 - (inf u0')^2)";
    case CriterionId::blowup_c:
      return "m1(0)+m2(0) < -8|kappa| if (2 sqrt(3)/3)|mu0| < mu1, "
             "else m1(0)+m2(0) < -8|kappa| - 2 sqrt(2) C1, C1 = sqrt(|sqrt(3)/3 |mu0| - mu1/2| mu1)";
    case CriterionId::blowup_d:
      return "(mu0+kappa) H2 below the H2 threshold for the sign of mu0 (mu0+kappa) "
             "=> T <= 6 + (1+|V0|)/C0";
    case CriterionId::global_sign:
      return "m0 + kappa does not change sign => global solution";
    case CriterionId::global_h3:
      return "||d^3 u0||_L2 <= 2 sqrt(3) |mu0+kappa| => global solution";
  }
  return "";
}

struct CertificateInputs {
  double mu0 = 0.0;
  double mu1 = 0.0;
  double kappa = 0.0;
  double H2 = 0.0;
  double inf_slope = 0.0;   // inf u0' on the refined grid
  double m1 = 0.0;          // min u0' (same as inf_slope)
  double m2 = 0.0;          // max u0'
  double d3_norm = 0.0;     // ||d^3 u0||_L2
  double slope_cube = 0.0;  // V0 = int u0'^3
  double sup_u = 0.0;
  double min_m0 = 0.0;      // extrema of m0 = mu0 - u0''
  double max_m0 = 0.0;
  double d3_tail = 0.0;     // fraction of ||d^3 u0||^2 in |k| > n/3
};

struct Certificate {
  CriterionId id = CriterionId::blowup_a;
  bool applicable = false;
  CertificateInputs inputs;
  std::optional<double> bound;
  double margin = 0.0;
  std::string detail;
};

struct CertificateReport {
  CertificateInputs inputs;
  std::vector<Certificate> certificates;
  bool internal_contradiction = false;

  const Certificate& at(CriterionId id) const {
    for (const Certificate& c : certificates) {
      if (c.id == id) return c;
    }
    throw std::out_of_range("criterion not in report");
  }
};

inline constexpr std::size_t kCertificateRefinement = 4;

inline CertificateInputs certificate_inputs(const PeriodicField& u0, double kappa) {
  const std::size_t n = u0.grid().n();
  CertificateInputs in;
  const Conserved c = conserved(u0, kappa);
  const PeriodicField ux = derivative(u0, 1);
  in.mu0 = c.H0;
  in.mu1 = l2_norm(ux);
  in.kappa = kappa;
  in.H2 = c.H2;
  in.sup_u = sup_norm(u0);

  const PeriodicField ux_fine = refine(ux, kCertificateRefinement);
  const SlopeExtrema e = slope_extrema_of(ux_fine);
  in.m1 = e.m1;
  in.m2 = e.m2;
  in.inf_slope = e.m1;
  double v0 = 0.0;
  for (double v : ux_fine.values()) v0 += v * v * v;
  in.slope_cube = v0 / static_cast<double>(ux_fine.size());

  const PeriodicField m0_fine = refine(in.mu0 * PeriodicField::constant(u0.grid(), 1.0) - derivative(u0, 2),
                                       kCertificateRefinement);
  in.min_m0 = *std::min_element(m0_fine.values().begin(), m0_fine.values().end());
  in.max_m0 = *std::max_element(m0_fine.values().begin(), m0_fine.values().end());

  const Spectrum d3 = transform(derivative(u0, 3));
  const double total = spectral_energy(d3, n);
  in.d3_norm = std::sqrt(total);
  double tail = 0.0;
  for (std::size_t k = n / 3 + 1; k < n / 2; ++k) tail += 2.0 * std::norm(d3[k]);
  tail += std::norm(d3[n / 2]);
  in.d3_tail = total > 0.0 ? tail / total : 0.0;
  return in;
}

/// Constant data (up to round-off): the blow-up arithmetic is undefined.
inline bool is_degenerate(const CertificateInputs& in) {
  return in.mu1 <= 1e-12 * (1.0 + in.sup_u);
}

namespace detail {

inline std::string fmt(double v) {
  std::ostringstream os;
  os.precision(10);
  os << v;
  return os.str();
}

}  // namespace detail

// ---------------------------------------------------------------------------
// Blow-up criterion A: infimum of a convex life-span objective

struct LifeSpanObjective {
  double mu1 = 0.0;
  double shifted_mean = 0.0;  // mu0 + kappa
  double v0 = 0.0;            // int u0'^3

  /// Open interval I = ((mu0+kappa)^2 / (2 pi^2 mu1^2), 1/6).
  double lower() const {
    const double pi = std::numbers::pi;
    return shifted_mean * shifted_mean / (2.0 * pi * pi * mu1 * mu1);
  }
  double upper() const { return 1.0 / 6.0; }

  double operator()(double a) const {
    const double pi = std::numbers::pi;
    const double m4 = mu1 * mu1 * mu1 * mu1;
    const double den = 6.0 * pi * pi * a * m4 - 3.0 * shifted_mean * shifted_mean * mu1 * mu1;
    return 6.0 / (1.0 - 6.0 * a) + 4.0 * pi * pi * a * (1.0 + std::abs(v0)) / den;
  }
};

struct Infimum {
  double alpha = 0.0;
  double value = 0.0;
};

/// 64 log-spaced samples of the offset from the lower end, then Brent's
/// (golden-section plus parabolic) refinement around the best sample.
inline Infimum minimize_life_span(const LifeSpanObjective& f) {
  const double a = f.lower();
  const double b = f.upper();
  const double w = b - a;
  constexpr int kSamples = 64;
  std::array<double, kSamples> xs{};
  for (int i = 0; i < kSamples; ++i) {
    // offsets from w * 1e-12 up to w * (1 - 1e-12)
    const double e = -12.0 + 12.0 * static_cast<double>(i) / (kSamples - 1);
    xs[static_cast<std::size_t>(i)] = a + w * std::min(std::pow(10.0, e), 1.0 - 1e-12);
  }
  std::size_t best = 0;
  double best_val = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double v = f(xs[i]);
    if (std::isfinite(v) && v < best_val) {
      best_val = v;
      best = i;
    }
  }
  const double lo = best == 0 ? xs[0] : xs[best - 1];
  const double hi = best + 1 == xs.size() ? xs[best] : xs[best + 1];
  Infimum out{xs[best], best_val};
  if (hi > lo) {
    std::uintmax_t iters = 200;
    const auto r = boost::math::tools::brent_find_minima(f, lo, hi, std::numeric_limits<double>::digits / 2, iters);
    if (std::isfinite(r.second) && r.second < out.value) out = {r.first, r.second};
  }
  return out;
}

inline Certificate certify_blowup_a(const CertificateInputs& in) {
  if (is_degenerate(in)) throw DegenerateData("constant initial data: mu1 = 0");
  Certificate c{CriterionId::blowup_a, false, in, std::nullopt, 0.0, {}};
  const double s = in.mu0 + in.kappa;
  const double lhs = std::numbers::sqrt3 / std::numbers::pi * std::abs(s);
  c.margin = in.mu1 - lhs;
  c.applicable = lhs < in.mu1;
  if (!c.applicable) {
    c.detail = "sqrt(3)/pi |mu0+kappa| = " + detail::fmt(lhs) + " >= mu1 = " + detail::fmt(in.mu1);
    return c;
  }
  const LifeSpanObjective f{in.mu1, s, in.slope_cube};
  const Infimum inf = minimize_life_span(f);
  c.bound = inf.value;
  c.detail = "bound is the numerical infimum over the open interval (" + detail::fmt(f.lower()) +
             ", 1/6), reached near alpha = " + detail::fmt(inf.alpha) + "; the infimum is not attained";
  return c;
}

// ---------------------------------------------------------------------------
// Blow-up criterion B

inline Certificate certify_blowup_b(const CertificateInputs& in) {
  Certificate c{CriterionId::blowup_b, false, in, std::nullopt, 0.0, {}};
  if (is_degenerate(in)) {
    c.detail = "constant initial data";
    return c;
  }
  const double s = std::abs(in.mu0 + in.kappa);
  const double lhs = std::numbers::sqrt3 / std::numbers::pi * s;
  const double regime_margin = lhs - in.mu1;
  if (regime_margin < 0.0) {
    c.margin = regime_margin;
    c.detail = "sqrt(3)/pi |mu0+kappa| < mu1";
    return c;
  }
  const double k2 = 2.0 * in.mu1 * (std::numbers::sqrt3 / 3.0 * s - 0.5 * in.mu1);
  const double K = std::sqrt(std::max(k2, 0.0));
  const double slope_margin = -K - in.inf_slope;
  c.margin = std::min(regime_margin, slope_margin);
  c.applicable = in.inf_slope < -K;
  c.detail = "K = " + detail::fmt(K) + ", inf u0' = " + detail::fmt(in.inf_slope);
  if (c.applicable) c.bound = in.inf_slope / (K * K - in.inf_slope * in.inf_slope);
  return c;
}

// ---------------------------------------------------------------------------
// Blow-up criterion C

inline Certificate certify_blowup_c(const CertificateInputs& in) {
  Certificate c{CriterionId::blowup_c, false, in, std::nullopt, 0.0, {}};
  if (is_degenerate(in)) {
    c.detail = "constant initial data";
    return c;
  }
  const double ak = std::abs(in.kappa);
  const double am = std::abs(in.mu0);
  const double sum = in.m1 + in.m2;
  if (2.0 * std::numbers::sqrt3 / 3.0 * am < in.mu1) {
    const double threshold = -8.0 * ak;
    c.margin = threshold - sum;
    c.applicable = sum < threshold;
    c.detail = "case (2 sqrt(3)/3)|mu0| < mu1; m1+m2 = " + detail::fmt(sum);
    if (c.applicable) c.bound = -2.0 / (in.m1 + 4.0 * ak);
    return c;
  }
  const double c1 = std::sqrt(std::abs(std::numbers::sqrt3 / 3.0 * am - 0.5 * in.mu1) * in.mu1);
  const double r = 2.0 * std::numbers::sqrt2 * c1;
  const double threshold = -8.0 * ak - r;
  c.margin = threshold - sum;
  c.applicable = sum < threshold;
  c.detail = "case (2 sqrt(3)/3)|mu0| >= mu1; C1 = " + detail::fmt(c1) + ", m1+m2 = " + detail::fmt(sum);
  if (c.applicable) {
    // Largest delta0 in (0, 1/2] with m1+m2 <= -(8|kappa| + delta0) - 2 sqrt(2)(1 + delta0) C1.
    const double delta0 = std::min(0.5, (-sum - 8.0 * ak - r) / (1.0 + r));
    c.bound = -2.0 * (1.0 + delta0) / (delta0 * (in.m1 + 4.0 * ak));
    c.detail += "; delta0 = " + detail::fmt(delta0) +
                " (largest admissible); bound is proof-derived, not theorem-stated";
  }
  return c;
}

// ---------------------------------------------------------------------------
// Blow-up criterion D

inline Certificate certify_blowup_d(const CertificateInputs& in) {
  Certificate c{CriterionId::blowup_d, false, in, std::nullopt, 0.0, {}};
  if (is_degenerate(in)) {
    c.detail = "constant initial data";
    return c;
  }
  const double pi = std::numbers::pi;
  const double s = in.mu0 + in.kappa;
  const double p = in.mu0 * s;
  const double mu1sq = in.mu1 * in.mu1;
  const double mu1_4 = mu1sq * mu1sq;
  const double mu0sq = in.mu0 * in.mu0;
  double rhs_value = 0.0, c0 = 0.0;
  if (p >= 0.0) {
    rhs_value = mu1_4 / 8.0 + 0.5 * p * (2.0 * mu0sq + mu1sq);
    c0 = 1.5 * mu1_4 + 6.0 * p * (mu1sq + 2.0 * mu0sq) - 12.0 * s * in.H2;
    c.detail = "branch mu0 (mu0+kappa) >= 0";
  } else {
    rhs_value = mu1_4 / 8.0 + 0.5 * p * (2.0 * mu0sq + (1.0 + 1.0 / (2.0 * pi * pi)) * mu1sq);
    c0 = 1.5 * mu1_4 + p * ((6.0 + 3.0 / (pi * pi)) * mu1sq + 12.0 * mu0sq) - 12.0 * s * in.H2;
    c.detail = "branch mu0 (mu0+kappa) < 0";
  }
  const double lhs = s * in.H2;
  c.margin = rhs_value - lhs;
  c.applicable = lhs < rhs_value && c0 > 0.0;
  c.detail += "; C0 = " + detail::fmt(c0);
  if (c.applicable) c.bound = 6.0 + (1.0 + std::abs(in.slope_cube)) / c0;
  return c;
}

// ---------------------------------------------------------------------------
// Global existence

inline Certificate certify_global_sign(const CertificateInputs& in) {
  Certificate c{CriterionId::global_sign, false, in, std::nullopt, 0.0, {}};
  const double sup_m0 = std::max(std::abs(in.min_m0), std::abs(in.max_m0));
  const double tol = 1e-10 * (1.0 + sup_m0);
  const double lo = in.min_m0 + in.kappa;
  const double hi = in.max_m0 + in.kappa;
  c.margin = std::max(lo, -hi);
  c.applicable = lo >= -tol || hi <= tol;
  c.detail = "m0+kappa in [" + detail::fmt(lo) + ", " + detail::fmt(hi) +
             "]; slope lower bound -|mu0+kappa| = " + detail::fmt(-std::abs(in.mu0 + in.kappa));
  return c;
}

inline Certificate certify_global_h3(const CertificateInputs& in) {
  Certificate c{CriterionId::global_h3, false, in, std::nullopt, 0.0, {}};
  const double rhs_value = 2.0 * std::numbers::sqrt3 * std::abs(in.mu0 + in.kappa);
  c.margin = rhs_value - in.d3_norm;
  c.applicable = in.d3_norm <= rhs_value;
  c.detail = "||d^3 u0|| = " + detail::fmt(in.d3_norm) + ", 2 sqrt(3)|mu0+kappa| = " + detail::fmt(rhs_value);
  if (in.d3_tail > 1e-6) {
    c.detail += "; warning: " + detail::fmt(in.d3_tail) +
                " of the third-derivative energy sits in the top third of the spectrum";
  }
  return c;
}

// ---------------------------------------------------------------------------

inline Certificate certify(CriterionId id, const CertificateInputs& in) {
  switch (id) {
    case CriterionId::blowup_a: return certify_blowup_a(in);
    case CriterionId::blowup_b: return certify_blowup_b(in);
    case CriterionId::blowup_c: return certify_blowup_c(in);
    case CriterionId::blowup_d: return certify_blowup_d(in);
    case CriterionId::global_sign: return certify_global_sign(in);
    case CriterionId::global_h3: return certify_global_h3(in);
  }
  throw std::invalid_argument("unknown criterion");
}

inline Certificate certify(CriterionId id, const PeriodicField& u0, double kappa) {
  return certify(id, certificate_inputs(u0, kappa));
}

inline Certificate certify_blowup_a(const PeriodicField& u0, double kappa) {
  return certify_blowup_a(certificate_inputs(u0, kappa));
}
inline Certificate certify_blowup_b(const PeriodicField& u0, double kappa) {
  return certify_blowup_b(certificate_inputs(u0, kappa));
}
inline Certificate certify_blowup_c(const PeriodicField& u0, double kappa) {
  return certify_blowup_c(certificate_inputs(u0, kappa));
}
inline Certificate certify_blowup_d(const PeriodicField& u0, double kappa) {
  return certify_blowup_d(certificate_inputs(u0, kappa));
}
inline Certificate certify_global_sign(const PeriodicField& u0, double kappa) {
  return certify_global_sign(certificate_inputs(u0, kappa));
}
inline Certificate certify_global_h3(const PeriodicField& u0, double kappa) {
  return certify_global_h3(certificate_inputs(u0, kappa));
}

/// All six criteria. A blow-up and a global certificate on the same input
/// would contradict each other; the report flags it.
inline CertificateReport certify_all(const PeriodicField& u0, double kappa) {
  CertificateReport r;
  r.inputs = certificate_inputs(u0, kappa);
  for (CriterionId id : kAllCriteria) {
    try {
      r.certificates.push_back(certify(id, r.inputs));
    } catch (const DegenerateData& e) {
      r.certificates.push_back(Certificate{id, false, r.inputs, std::nullopt, 0.0, e.what()});
    }
  }
  bool any_blowup = false, any_global = false;
  for (const Certificate& c : r.certificates) {
    if (!c.applicable) continue;
    (is_blowup(c.id) ? any_blowup : any_global) = true;
  }
  r.internal_contradiction = any_blowup && any_global;
  return r;
}

}  // namespace mu_ch
