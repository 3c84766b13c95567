#pragma once

// Entry point of the mvac command-line tool, kept in a library so tests can
// drive it in-process.

#include <iosfwd>
#include <string>
#include <vector>

namespace mvac::cli {

/// Runs one command. `args` excludes the program name. Returns the process
/// exit status: 0 on success, 2 on a usage or validation error, 1 on a
/// numerical failure (with a JSON error record on `out`).
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mvac::cli
