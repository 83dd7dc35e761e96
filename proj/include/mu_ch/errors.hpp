#pragma once

#include <stdexcept>
#include <string>

namespace mu_ch {

/// Invalid run configuration. The message carries a JSON-path-like location
/// of the offending field (e.g. "$.ic.sine.k").
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The CFL step fell below the configured floor; usually the solution is
/// about to break.
class StepUnderflow : public std::runtime_error {
 public:
  StepUnderflow(double dt, double dt_min)
      : std::runtime_error("step size " + std::to_string(dt) + " below dt_min " +
                           std::to_string(dt_min)),
        dt_(dt) {}
  double dt() const noexcept { return dt_; }

 private:
  double dt_;
};

/// Initial data for which a criterion's arithmetic is undefined (constant data).
class DegenerateData : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A consistency check that should never fail did (e.g. contradictory
/// certificates).
class InternalAssertion : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace mu_ch
