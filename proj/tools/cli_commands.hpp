#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace christoffel::cli {

/// Process exit codes.
enum ExitCode : int { kOk = 0, kUsage = 2, kIo = 3, kNumerical = 4 };

/// JSON format version embedded in every summary.
inline constexpr const char* kFormatVersion = "1";

/// Runs the command line `args` (args[0] is the program name). Diagnostics go
/// to `err`; outputs without an explicit path go to `out`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace christoffel::cli
