#include "reslab/error.hpp"

namespace reslab {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::UnsupportedContinuation: return "UnsupportedContinuation";
    case ErrorCode::StepFailure: return "StepFailure";
    case ErrorCode::EmptyCloud: return "EmptyCloud";
    case ErrorCode::DegenerateLadder: return "DegenerateLadder";
    case ErrorCode::NegativeDimension: return "NegativeDimension";
    case ErrorCode::BadParams: return "BadParams";
    case ErrorCode::EmptyTarget: return "EmptyTarget";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::BadAngle: return "BadAngle";
    case ErrorCode::GridTooCoarse: return "GridTooCoarse";
    case ErrorCode::ConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::SizeOverflow: return "SizeOverflow";
    case ErrorCode::DegenerateFit: return "DegenerateFit";
    case ErrorCode::WindowOutsideComputedRegion: return "WindowOutsideComputedRegion";
    case ErrorCode::DegenerateEnergySurface: return "DegenerateEnergySurface";
    case ErrorCode::UnknownArtifactKind: return "UnknownArtifactKind";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace reslab
