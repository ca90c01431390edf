#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ghyp {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitIo = 1;           // I/O or parse failure
inline constexpr int kExitStatistical = 2;  // statistical infeasibility or usage error

// Entry point of the `ghyp` tool; argv[0] is the program name. Primary
// output goes to `out` unless --out is given, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ghyp
