#pragma once

#include <stdexcept>
#include <string>

namespace niplab {

enum class ErrorCode {
  invalid_configuration,
  domain,
  unsupported,
  singular_potential,
  not_a_metric,
  conditioning,
  degenerate_state,
  derivative,
  numerical,
  instability,
};

const char* to_string(ErrorCode code);

/// Single exception type for the library; the code tells callers (and the
/// CLI exit-code mapping) which family of failure occurred.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

  /// True for failures caused by bad inputs rather than by the numerics.
  bool is_configuration() const noexcept;

 private:
  ErrorCode code_;
};

/// Raised by time integrators when the tracked norm drifts past the abort
/// threshold or the state stops being finite.
class InstabilityError : public Error {
 public:
  InstabilityError(const std::string& message, int step, double last_stable_time)
      : Error(ErrorCode::instability, message),
        step_(step),
        last_stable_time_(last_stable_time) {}

  int step() const noexcept { return step_; }
  double last_stable_time() const noexcept { return last_stable_time_; }

 private:
  int step_;
  double last_stable_time_;
};

}  // namespace niplab
