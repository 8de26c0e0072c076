#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace lge {

// Runs one subcommand. args excludes the program name. Data goes to `out`,
// diagnostics and summaries to `err`. Returns the process exit status.
int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace lge
