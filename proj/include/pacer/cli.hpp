#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace pacer {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int {
    kExitOk = 0,
    kExitUsage = 2,
    kExitInput = 3,
    kExitInfeasible = 4,
    kExitFingerprint = 5,
};

// Runs one subcommand; args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pacer
