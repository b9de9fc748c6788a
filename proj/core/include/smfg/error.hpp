#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace smfg {

enum class ErrorCode {
  AlphaOutOfRange,
  BetaOutOfRange,
  BracketFailure,
  QuadratureNonConvergence,
  BadTags,
  InvalidArgument,
  NoRoot,
  InstanceTooLarge,
};

std::string_view to_string(ErrorCode code) noexcept;

/// Exception carrying a machine-readable code. what() is prefixed with the
/// code name so CLI messages can be matched on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace smfg
