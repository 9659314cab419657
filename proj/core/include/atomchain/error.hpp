#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace atomchain {

enum class ErrorKind {
  SingularPoint,
  InvalidOrder,
  NonPositiveSeparation,
  LightLineSingularity,
  DegenerateBands,
  InvalidParams,
  OutOfRangeTime,
  StepTooLarge,
  NonFiniteState,
  EmptyState,
  InsufficientSamples,
  ScheduleMismatch,
  ParseError,
  ValidationError,
  IoError,
};

std::string_view to_string(ErrorKind kind);

// Numerical failures map to CLI exit code 2, input problems to 1.
bool is_numerical(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace atomchain
