#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace linrecover::cli {

enum ExitCode : int { kOk = 0, kIo = 1, kUsage = 2, kNumeric = 3 };

/// Runs the command line `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

} // namespace linrecover::cli
