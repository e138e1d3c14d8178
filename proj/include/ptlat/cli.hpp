#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace ptlat {

enum ExitCode : int { kExitOk = 0, kExitUsage = 2, kExitNumeric = 3, kExitPartial = 4 };

// Runs one command line (without the program name). Data files go under
// --out; progress and results are printed to `out`, diagnostics to `err`.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ptlat
