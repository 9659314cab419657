#include "atomchain/error.hpp"

namespace atomchain {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::SingularPoint: return "SingularPoint";
    case ErrorKind::InvalidOrder: return "InvalidOrder";
    case ErrorKind::NonPositiveSeparation: return "NonPositiveSeparation";
    case ErrorKind::LightLineSingularity: return "LightLineSingularity";
    case ErrorKind::DegenerateBands: return "DegenerateBands";
    case ErrorKind::InvalidParams: return "InvalidParams";
    case ErrorKind::OutOfRangeTime: return "OutOfRangeTime";
    case ErrorKind::StepTooLarge: return "StepTooLarge";
    case ErrorKind::NonFiniteState: return "NonFiniteState";
    case ErrorKind::EmptyState: return "EmptyState";
    case ErrorKind::InsufficientSamples: return "InsufficientSamples";
    case ErrorKind::ScheduleMismatch: return "ScheduleMismatch";
    case ErrorKind::ParseError: return "ParseError";
    case ErrorKind::ValidationError: return "ValidationError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

bool is_numerical(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidParams:
    case ErrorKind::ParseError:
    case ErrorKind::ValidationError:
    case ErrorKind::ScheduleMismatch:
    case ErrorKind::OutOfRangeTime:
    case ErrorKind::IoError:
      return false;
    default:
      return true;
  }
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

}  // namespace atomchain
