#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tvcert::cli {

enum ExitCode : int {
    kOk = 0,
    kFailure = 1,  // any other runtime error, e.g. an unresolvable scan grid
    kConfigError = 2,
    kConditioning = 3,
    kVerdictFailed = 4,
    kNotConverged = 5,
};

/// Runs one subcommand; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tvcert::cli
