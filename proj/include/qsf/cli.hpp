#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qsf::cli {

// Runs one CLI invocation. args excludes the program name. Returns the exit
// code: 0 success, 1 runtime error, 2 usage error, 3 search failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qsf::cli
