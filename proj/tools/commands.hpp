#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <ostream>

namespace gmf::cli {

enum ExitCode : int { kOk = 0, kRuntimeFailure = 1, kUsageError = 2 };

/// Command-line values; each set field overrides the config key of the same name.
struct CommandOptions {
  std::filesystem::path config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> runs;
  std::optional<std::filesystem::path> out;
  std::optional<int> jobs;
  bool overwrite = false;
  bool log_only = false;
  /// Measurement log for `replay`.
  std::filesystem::path log;
};

/// Each command prints progress to `out`, errors to `err`, and returns an ExitCode.
int cmd_bench_tricyclist(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_sim_radio(const CommandOptions& options, std::ostream& out, std::ostream& err);
int cmd_replay(const CommandOptions& options, std::ostream& out, std::ostream& err);

}  // namespace gmf::cli
