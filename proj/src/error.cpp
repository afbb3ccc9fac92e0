#include "zolab/error.hpp"

namespace zolab {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::BallTooLarge: return "BallTooLarge";
    case ErrorCode::MalformedPBM: return "MalformedPBM";
    case ErrorCode::NonSquare: return "NonSquare";
    case ErrorCode::SyntaxError: return "SyntaxError";
    case ErrorCode::UnboundVariable: return "UnboundVariable";
    case ErrorCode::ShadowedVariable: return "ShadowedVariable";
    case ErrorCode::UnassignedFreeVariable: return "UnassignedFreeVariable";
    case ErrorCode::WorkBudgetExceeded: return "WorkBudgetExceeded";
    case ErrorCode::ImageTooSmall: return "ImageTooSmall";
    case ErrorCode::RadiusTooLarge: return "RadiusTooLarge";
    case ErrorCode::TooLargeToEnumerate: return "TooLargeToEnumerate";
    case ErrorCode::UnsupportedRate: return "UnsupportedRate";
    case ErrorCode::MalformedDocument: return "MalformedDocument";
  }
  return "Unknown";
}

bool is_resource_error(ErrorCode code) {
  return code == ErrorCode::WorkBudgetExceeded || code == ErrorCode::RadiusTooLarge ||
         code == ErrorCode::TooLargeToEnumerate;
}

}  // namespace zolab
