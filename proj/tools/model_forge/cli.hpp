#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mforge::cli {

/// Exit statuses of the command-line front end.
enum ExitStatus : int {
    kOk = 0,
    kErrors = 1,  // diagnostics with errors, or a failed run
    kUsage = 2,   // bad usage or unreadable/unwritable files
};

/// Runs `model-forge <args...>` (program name excluded) against the given streams.
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

} // namespace mforge::cli
