#pragma once

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <vector>

namespace visbp::cli {

enum ExitCode : int {
    kSuccess = 0,
    kUsageError = 2,
    kInputError = 3,
    kInvariantViolation = 4,
};

/// Bad flags or an unknown name on the command line.
class UsageError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Runs the visbp command line. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace visbp::cli
