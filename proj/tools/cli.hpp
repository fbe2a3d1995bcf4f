#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace rcmdp::cli {

enum ExitCode : int { kSuccess = 0, kUsage = 2, kData = 3, kPropertyFailure = 4 };

/// Runs one invocation. `args` excludes the program name. Results go to files
/// and `out`; failures are reported on `err` as a JSON error document.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rcmdp::cli
