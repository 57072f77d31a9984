#pragma once

#include <iosfwd>

#include "dwmrpm/cli/run_config.hpp"

namespace dwmrpm::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;  // contract, data and I/O errors
inline constexpr int kExitUsage = 2;

/// Parses argv and runs one of: ingest, summarize, synth, train, predict,
/// evaluate, compare. Never throws; failures become exit codes with a message
/// on err.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// Executes an already-parsed configuration. Library errors propagate.
void execute(const RunConfig& cfg, std::ostream& out, std::ostream& log);

}  // namespace dwmrpm::cli
