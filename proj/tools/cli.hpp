#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace finfo::cli {

/// Runs the command line `args` (without the program name). Results go to
/// `out` unless an --out path is given; diagnostics go to `err`.
/// Returns the process exit code: 0 ok, 2 usage, 3 data, 4 numerical.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace finfo::cli
