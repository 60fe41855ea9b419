#pragma once

#include <stdexcept>
#include <string>

namespace aer {

enum class ErrorCode {
  InvalidArgument,
  AssumptionViolated,
  NonFiniteSource,
  NonrealRegularFunction,
  FrontExitedDomain,
  StepTooLarge,
  DegenerateLayer,
  OutOfDomain,
  CFLViolation,
  NonFiniteState,
  TimeNotStored,
  EmptyRegion,
  NoLayerDetected,
  DegenerateSide,
  MissingGradient,
  NonUniformGrid,
  OneSidedData,
  InfeasibleSet,
  InfeasibleEstimate,
  ConfigError,
  IoError,
};

const char* to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code; every library failure is one of these.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace aer
