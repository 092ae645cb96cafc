#include "spherosim/error.hpp"

namespace spherosim {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::Io: return "Io";
    case ErrorCode::SouthPoleSingularity: return "SouthPoleSingularity";
    case ErrorCode::LevelOutOfRange: return "LevelOutOfRange";
    case ErrorCode::NonUnitDirection: return "NonUnitDirection";
    case ErrorCode::ProfileOutOfRange: return "ProfileOutOfRange";
    case ErrorCode::EpsilonOutOfRange: return "EpsilonOutOfRange";
    case ErrorCode::NotARotation: return "NotARotation";
    case ErrorCode::DegenerateBlend: return "DegenerateBlend";
    case ErrorCode::IllConditionedTriangle: return "IllConditionedTriangle";
    case ErrorCode::UnsupportedTail: return "UnsupportedTail";
    case ErrorCode::NotEquivariant: return "NotEquivariant";
    case ErrorCode::MidpointNoConvergence: return "MidpointNoConvergence";
    case ErrorCode::TargetTooSmall: return "TargetTooSmall";
    case ErrorCode::TargetUnreachable: return "TargetUnreachable";
    case ErrorCode::TopologicalSectorChange: return "TopologicalSectorChange";
    case ErrorCode::MaxIterations: return "MaxIterations";
    case ErrorCode::RouteMismatch: return "RouteMismatch";
  }
  return "Unknown";
}

bool is_numerical_failure(ErrorCode code) {
  switch (code) {
    case ErrorCode::DegenerateBlend:
    case ErrorCode::IllConditionedTriangle:
    case ErrorCode::MidpointNoConvergence:
    case ErrorCode::TargetUnreachable:
    case ErrorCode::TopologicalSectorChange:
    case ErrorCode::MaxIterations:
    case ErrorCode::RouteMismatch:
    case ErrorCode::NotEquivariant:
    case ErrorCode::UnsupportedTail:
      return true;
    default:
      return false;
  }
}

}  // namespace spherosim
