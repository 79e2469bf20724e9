#pragma once

#include <iosfwd>

namespace ldfm {

// Exit codes of the command-line front end.
inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumeric = 3;

/// Parses argv (argv[0] is the program name) and runs one subcommand:
/// train, eval, query, sample, gen-data or check. Never throws.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ldfm
