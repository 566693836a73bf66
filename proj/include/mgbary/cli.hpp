#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace mgbary::cli {

// Runs one subcommand. args excludes the program name. Results go to out
// (or to --output when given); failures print {"error", "detail"} to err
// and return 1.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace mgbary::cli
