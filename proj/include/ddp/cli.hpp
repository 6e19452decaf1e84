#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ddp::cli {

/// Exit status for malformed command lines.
inline constexpr int usage_error = 2;
/// Exit status for validation and runtime failures.
inline constexpr int runtime_error = 1;

/// Parses `args` (without the program name) and runs the subcommand.
/// Returns the process exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Worker count: hardware concurrency, capped by DDP_THREADS when set.
unsigned worker_threads();

}  // namespace ddp::cli
