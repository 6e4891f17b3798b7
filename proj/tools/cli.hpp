#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace burnout::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitIo = 2;

// Runs one subcommand. args excludes the program name. Output goes to out, and
// diagnostics to err.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace burnout::cli
