#pragma once

#include <stdexcept>
#include <string>

namespace dislo {

// Bad argument or out-of-domain input (NaN, negative y, ...).
struct DomainError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

// Malformed external data (CSV layout, config file, ...).
struct FormatError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Inconsistent run configuration (unresolved core, CFL violation, ...).
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Iteration failed to converge; `detail` carries the residual history or
// the offending quantity.
struct ConvergenceError : std::runtime_error {
  explicit ConvergenceError(const std::string& what, std::string detail = {})
      : std::runtime_error(what), detail(std::move(detail)) {}
  std::string detail;
};

// Evaluation at (or across) a singular configuration, e.g. coincident
// particles or a Green-function source equal to its target.
struct SingularityError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Step-size underflow while two particles approach each other.
struct CollisionError : std::runtime_error {
  CollisionError(const std::string& what, double blowup_time_estimate)
      : std::runtime_error(what), blowup_time(blowup_time_estimate) {}
  double blowup_time;
};

// Requested check does not apply to the given object (e.g. a distance bound
// on a perturbed trajectory).
struct NotApplicableError : std::logic_error {
  using std::logic_error::logic_error;
};

// Level-crossing extraction failed (trace never reaches a level).
struct TrackingError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace dislo
