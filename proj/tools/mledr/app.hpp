#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace mledr::cli {

enum ExitCode { kOk = 0, kUsage = 2, kRuntime = 3 };

/// Parses arguments (without the program name) and runs one subcommand.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mledr::cli
