#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace poscop {

// Runs the command-line interface on `args` (program name excluded).
// Successful results go to `out`; errors go to `err` and nothing is written
// to `out`.  Returns 0 on success, 1 on a domain error (unreadable files,
// invalid models, impossible evidence, ...), 2 on a usage error.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace poscop
