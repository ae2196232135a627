#pragma once

#include <iosfwd>

namespace patchxfer {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailure = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `patchxfer` tool (subcommands sr, match, bench,
/// metrics, gd). Returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace patchxfer
