#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace curvelane {

enum class ErrorCode {
  ChannelMismatch,
  InvalidSigma,
  BadThresholds,
  InvalidParameter,
  DegenerateConfiguration,
  EmptyEdgeMap,
  DegenerateSegment,
  VerticalLine,
  ZeroMass,
  DegeneratePair,
  EmptyInput,
  InsufficientSamples,
  DegenerateSpan,
  LengthMismatch,
  EmptyLibrary,
  TileTooLarge,
  ShapeMismatch,
  FrameOrderViolation,
  SpecInvalid,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

// Error raised from inside a pipeline stage, tagged with the stage name.
class StageError : public Error {
 public:
  StageError(std::string stage, const Error& cause);

  const std::string& stage() const noexcept { return stage_; }

 private:
  std::string stage_;
};

}  // namespace curvelane
