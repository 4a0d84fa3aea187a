#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tlc::cli {

/// Parses `args` (without the program name), runs the subcommand and returns
/// the exit status: 0 success, 1 usage, 2 I/O, 3 data/shape, 4 property failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tlc::cli
