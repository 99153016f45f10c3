#pragma once

#include <string>
#include <vector>

namespace fauio {

// Whole command-line tool behind a testable entry point. `args` excludes the
// program name. Exit codes: 0 success, 1 analysis failure (infeasible
// synthesis, failed assumption, diverging simulation, violated energy
// bound), 2 input error (bad flags, unreadable or malformed files).
int cli_main(const std::vector<std::string>& args);

}  // namespace fauio
