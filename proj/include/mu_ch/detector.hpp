#pragma once

// Runtime wave-breaking detection.
//
// A smooth solution breaks when inf u_x -> -inf while u stays bounded. On a
// fixed grid the computed slope saturates long before it reaches a large
// threshold, so the detector also fires when the slope spectrum leaves the
// resolved band (the fraction of u_x energy in n/6 < |k| <= n/3 exceeds a
// tolerance). At the trigger the remaining life span is extrapolated from the
// leading-order Riccati law w' = -w^2/2 along the steepest characteristic,
// which gives t_blowup ~ t_detect - 2/m1.

#include <cmath>
#include <optional>
#include <span>
#include <string>
#include <string_view>

namespace mu_ch {

enum class BreakTrigger { slope_threshold, underresolved, step_underflow };

inline std::string_view to_string(BreakTrigger t) {
  switch (t) {
    case BreakTrigger::slope_threshold: return "slope_threshold";
    case BreakTrigger::underresolved: return "underresolved";
    case BreakTrigger::step_underflow: return "step_underflow";
  }
  return "unknown";
}

struct BreakEvent {
  double t_detect = 0.0;
  double x = 0.0;      // location of the steepest negative slope
  double slope = 0.0;  // m1 at t_detect
  BreakTrigger trigger = BreakTrigger::slope_threshold;

  /// Extrapolated blow-up time t_detect - 2/m1 (t_detect itself if m1 >= 0).
  double t_blowup_estimate() const {
    if (!(slope < 0.0)) return t_detect;
    return t_detect - 2.0 / slope;
  }
};

struct DetectorOptions {
  bool enabled = true;
  double slope_threshold = 1e3;
  double tail_tolerance = 1e-8;
};

/// The quantities the detector looks at, taken from one solver state.
struct SlopeSample {
  double t = 0.0;
  double m1 = 0.0;
  double x1 = 0.0;
  double tail = 0.0;
};

inline std::optional<BreakEvent> check_breaking(const SlopeSample& s, const DetectorOptions& opt) {
  if (!opt.enabled) return std::nullopt;
  if (s.m1 <= -opt.slope_threshold) {
    return BreakEvent{s.t, s.x1, s.m1, BreakTrigger::slope_threshold};
  }
  if (s.tail > opt.tail_tolerance) {
    return BreakEvent{s.t, s.x1, s.m1, BreakTrigger::underresolved};
  }
  return std::nullopt;
}

/// First sample of a diagnostic stream at which the detector fires.
template <class Diag>
std::optional<BreakEvent> detect_breaking(std::span<const Diag> stream, const DetectorOptions& opt) {
  for (const Diag& d : stream) {
    if (auto ev = check_breaking(SlopeSample{d.t, d.m1, d.x1, d.tail}, opt)) return ev;
  }
  return std::nullopt;
}

}  // namespace mu_ch
