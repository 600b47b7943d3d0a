#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace kmvar::cli {

/// Exit codes.
enum ExitCode : int {
    kOk = 0,
    kFailure = 1,       ///< unexpected internal error
    kUnreadable = 2,    ///< input file missing or unreadable
    kMalformed = 3,     ///< bad CSV record or empty dataset
    kUsage = 64,        ///< invalid flags or simulation config
    kCantCreate = 73,   ///< output could not be written
};

/// Environment variable that, when set, is the base directory for relative
/// output paths.
inline constexpr const char* kOutputDirEnv = "KMVAR_OUTPUT_DIR";

/// Runs the command line `args` (args[0] is the program name). Data goes to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace kmvar::cli
