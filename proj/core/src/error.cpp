#include "smfg/error.hpp"

namespace smfg {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::AlphaOutOfRange: return "AlphaOutOfRange";
    case ErrorCode::BetaOutOfRange: return "BetaOutOfRange";
    case ErrorCode::BracketFailure: return "BracketFailure";
    case ErrorCode::QuadratureNonConvergence: return "QuadratureNonConvergence";
    case ErrorCode::BadTags: return "BadTags";
    case ErrorCode::InvalidArgument: return "InvalidArgument";
    case ErrorCode::NoRoot: return "NoRoot";
    case ErrorCode::InstanceTooLarge: return "InstanceTooLarge";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace smfg
