#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace agglo {

// Runs the command-line tool. `args` excludes the program name. Returns the
// process exit code: 0 on success, 1 for bad input, 2 for internal errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace agglo
