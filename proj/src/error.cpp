#include "curvelane/error.hpp"

namespace curvelane {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::ChannelMismatch: return "ChannelMismatch";
    case ErrorCode::InvalidSigma: return "InvalidSigma";
    case ErrorCode::BadThresholds: return "BadThresholds";
    case ErrorCode::InvalidParameter: return "InvalidParameter";
    case ErrorCode::DegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::EmptyEdgeMap: return "EmptyEdgeMap";
    case ErrorCode::DegenerateSegment: return "DegenerateSegment";
    case ErrorCode::VerticalLine: return "VerticalLine";
    case ErrorCode::ZeroMass: return "ZeroMass";
    case ErrorCode::DegeneratePair: return "DegeneratePair";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::InsufficientSamples: return "InsufficientSamples";
    case ErrorCode::DegenerateSpan: return "DegenerateSpan";
    case ErrorCode::LengthMismatch: return "LengthMismatch";
    case ErrorCode::EmptyLibrary: return "EmptyLibrary";
    case ErrorCode::TileTooLarge: return "TileTooLarge";
    case ErrorCode::ShapeMismatch: return "ShapeMismatch";
    case ErrorCode::FrameOrderViolation: return "FrameOrderViolation";
    case ErrorCode::SpecInvalid: return "SpecInvalid";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

StageError::StageError(std::string stage, const Error& cause)
    : Error(cause.code(), "[" + stage + "] " + cause.what()), stage_(std::move(stage)) {}

}  // namespace curvelane
