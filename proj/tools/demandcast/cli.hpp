#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace demandcast::cli {

enum ExitCode : int {
    kOk = 0,
    kUsage = 1,
    kInput = 2,
    kInsufficientData = 3,
    kNumerical = 4,
};

/// Runs the command line. args excludes the program name. Normal output goes
/// to `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace demandcast::cli
