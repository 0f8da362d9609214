#pragma once

#include <iosfwd>

namespace symsys {

/// Exit statuses of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;  ///< verify-symmetry found a failing entry
inline constexpr int kExitUsage = 2;        ///< bad flags, preset or config
inline constexpr int kExitRuntime = 3;      ///< I/O or numerical failure while running

/// Entry point of the `symsys` tool. Subcommands: gen-data, transform, train,
/// kernel, regress, verify-symmetry, sweep, width-sweep, learning-curve,
/// sdist-path, report. Every run writes <out>/manifest.json.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace symsys
