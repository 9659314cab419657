#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace atomchain::cli {

/// Runs the command line `args` (without the program name). Exit codes:
/// 0 success, 1 invalid input, 2 numerical failure.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace atomchain::cli
