#pragma once

#include <filesystem>
#include <optional>
#include <string>

#include "cbsq/config.hpp"

namespace cbsq {

/// Exit codes (stable contract):
///   0 success, 1 unexpected failure, 2 config/usage error, 3 I/O error,
///   4 verification failure, 5 confinement abort, 6 NaN abort,
///   7 quadrature accuracy failure, 8 domain/precondition error.
inline constexpr const char* version_string = "0.1.0";

struct RunOptions {
  int jobs = 1;
  std::optional<std::filesystem::path> resume_from;  // simulate only
};

/// Dispatches config.mode and writes its artifacts plus manifest.json into
/// config.output_dir. Returns the process exit status; errors are reported on
/// stderr and mapped through exit_code().
int run(const RunConfig& config, const RunOptions& options = {});

/// Same as run() but lets library errors propagate.
void run_or_throw(const RunConfig& config, const RunOptions& options = {});

}  // namespace cbsq
