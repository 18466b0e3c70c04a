#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rtw {

enum class ErrorCode {
  kNonFinite,
  kNotSpd,
  kAntipodalPoint,
  kZeroVector,
  kShapeMismatch,
  kNotScalar,
  kNoConvergence,
  kBadConfig,
  kTooLarge,
  kRejectionExhausted,
  kParseError,
  kManifestMismatch,
  kDegenerateVariance,
};

std::string_view to_string(ErrorCode code);

// True for errors caused by user input or configuration rather than numerics.
bool is_config_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace rtw
