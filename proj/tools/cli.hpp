#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ppgid::cli {

/// Exit codes: 0 success, 1 usage, 2 data, 3 algorithm.
enum ExitCode : int { ok = 0, usage = 1, data = 2, algorithm = 3 };

/// Runs one command line (`args` excludes the program name). Results go to
/// `out`, diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ppgid::cli
