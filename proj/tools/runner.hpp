#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>

namespace gmlab::cli {

struct RunOptions {
  std::string config_path;
  std::optional<std::uint64_t> seed_override;
  std::optional<std::string> out_dir;
  std::optional<std::size_t> threads;
};

/// Exit status of a finished experiment.
enum ExitCode : int { kOk = 0, kError = 1, kBoundFailure = 2 };

/// Runs the experiment named in the config and writes its outputs. Returns kOk or
/// kBoundFailure; errors propagate as exceptions (ConfigError, InvalidParameter, ...).
int run(const RunOptions& options, std::ostream& log);

}  // namespace gmlab::cli
