#include "aer/error.hpp"

namespace aer {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::AssumptionViolated: return "AssumptionViolated";
    case ErrorCode::NonFiniteSource: return "NonFiniteSource";
    case ErrorCode::NonrealRegularFunction: return "NonrealRegularFunction";
    case ErrorCode::FrontExitedDomain: return "FrontExitedDomain";
    case ErrorCode::StepTooLarge: return "StepTooLarge";
    case ErrorCode::DegenerateLayer: return "DegenerateLayer";
    case ErrorCode::OutOfDomain: return "OutOfDomain";
    case ErrorCode::CFLViolation: return "CFLViolation";
    case ErrorCode::NonFiniteState: return "NonFiniteState";
    case ErrorCode::TimeNotStored: return "TimeNotStored";
    case ErrorCode::EmptyRegion: return "EmptyRegion";
    case ErrorCode::NoLayerDetected: return "NoLayerDetected";
    case ErrorCode::DegenerateSide: return "DegenerateSide";
    case ErrorCode::MissingGradient: return "MissingGradient";
    case ErrorCode::NonUniformGrid: return "NonUniformGrid";
    case ErrorCode::OneSidedData: return "OneSidedData";
    case ErrorCode::InfeasibleSet: return "InfeasibleSet";
    case ErrorCode::InfeasibleEstimate: return "InfeasibleEstimate";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace aer
