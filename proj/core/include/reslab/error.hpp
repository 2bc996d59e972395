#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace reslab {

enum class ErrorCode {
  InvalidArgument,
  UnsupportedContinuation,
  StepFailure,
  EmptyCloud,
  DegenerateLadder,
  NegativeDimension,
  BadParams,
  EmptyTarget,
  ShapeMismatch,
  BadAngle,
  GridTooCoarse,
  ConvergenceFailure,
  SizeOverflow,
  DegenerateFit,
  WindowOutsideComputedRegion,
  DegenerateEnergySurface,
  UnknownArtifactKind,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Base exception for every failure raised by reslab. The code is the
/// machine-readable part; the message carries the numbers.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace reslab
