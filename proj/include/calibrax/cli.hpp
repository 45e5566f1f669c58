#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace calibrax {

// Runs the command-line tool. `args` excludes the program name. Artifacts
// go to `out` (when no --out path is given); diagnostics go to `err`.
// Returns 0 on success, 1 on runtime errors, 2 on usage errors.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace calibrax
