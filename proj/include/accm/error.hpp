#pragma once

#include <stdexcept>
#include <string>

namespace accm {

enum class ErrorKind {
  InvalidArgument,
  MetricError,
  OptimizerDiverged,
  InfeasibleConstraint,
  InvariantViolation,
  ConfigError,
};

const char* to_string(ErrorKind kind) noexcept;

/// Exception carrying a classification the CLI maps onto exit codes.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) noexcept {
  switch (kind) {
    case ErrorKind::InvalidArgument:
      return "invalid-argument";
    case ErrorKind::MetricError:
      return "metric-error";
    case ErrorKind::OptimizerDiverged:
      return "optimizer-diverged";
    case ErrorKind::InfeasibleConstraint:
      return "infeasible-constraint";
    case ErrorKind::InvariantViolation:
      return "invariant-violation";
    case ErrorKind::ConfigError:
      return "config-error";
  }
  return "unknown";
}

}  // namespace accm
