#include "rtw/error.hpp"

namespace rtw {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kNotSpd: return "NotSpd";
    case ErrorCode::kAntipodalPoint: return "AntipodalPoint";
    case ErrorCode::kZeroVector: return "ZeroVector";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNotScalar: return "NotScalar";
    case ErrorCode::kNoConvergence: return "NoConvergence";
    case ErrorCode::kBadConfig: return "BadConfig";
    case ErrorCode::kTooLarge: return "TooLarge";
    case ErrorCode::kRejectionExhausted: return "RejectionExhausted";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kManifestMismatch: return "ManifestMismatch";
    case ErrorCode::kDegenerateVariance: return "DegenerateVariance";
  }
  return "Unknown";
}

bool is_config_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::kBadConfig:
    case ErrorCode::kTooLarge:
    case ErrorCode::kParseError:
    case ErrorCode::kManifestMismatch:
    case ErrorCode::kShapeMismatch:
    case ErrorCode::kRejectionExhausted:
      return true;
    default:
      return false;
  }
}

}  // namespace rtw
