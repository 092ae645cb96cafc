#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace spherosim {

enum class ErrorCode {
  InvalidArgument,
  Io,
  SouthPoleSingularity,
  LevelOutOfRange,
  NonUnitDirection,
  ProfileOutOfRange,
  EpsilonOutOfRange,
  NotARotation,
  DegenerateBlend,
  IllConditionedTriangle,
  UnsupportedTail,
  NotEquivariant,
  MidpointNoConvergence,
  TargetTooSmall,
  TargetUnreachable,
  TopologicalSectorChange,
  MaxIterations,
  RouteMismatch,
};

std::string_view to_string(ErrorCode code);

// Numerical failures (as opposed to bad input) map to CLI exit code 2.
bool is_numerical_failure(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace spherosim
