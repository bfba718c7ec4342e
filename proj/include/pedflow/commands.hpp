#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace pedflow {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 2;
inline constexpr int kExitRuntime = 3;

/// Environment variable that overrides the scenario's output directory.
inline constexpr const char* kOutputEnv = "PEDFLOW_OUT";

struct CommandOptions {
  std::string subcommand;  // micro, macro, compare or validate
  std::filesystem::path scenario;
  std::optional<std::uint64_t> seed;
  std::optional<std::filesystem::path> out;
  unsigned workers = 1;
  std::optional<std::vector<double>> snapshots;
};

/// Runs one subcommand and returns the process exit code. Failures print a
/// single `error kind=<validation|runtime> message="..."` line to `err`.
int run_command(const CommandOptions& options, std::ostream& out, std::ostream& err);

}  // namespace pedflow
