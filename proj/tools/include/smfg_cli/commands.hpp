#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>

namespace smfg::cli {

enum ExitCode : int {
  kSuccess = 0,
  kConfigError = 2,
  kNonConvergence = 3,
  kVerificationBreach = 4,
};

struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::filesystem::path> output;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
};

// Progress goes to `out` unless quiet; failures always go to `err`.
int cmd_run(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_oracle_compare(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep(const CommandOptions& opts, std::ostream& out, std::ostream& err);
int cmd_check(const CommandOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace smfg::cli
