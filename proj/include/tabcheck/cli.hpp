#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tabcheck {

/// Entry point of the command-line tool. `args` excludes the program name.
/// Returns 0 (clean), 1 (a condition failed, or warned under --strict),
/// 2 (a check errored) or 3 (usage, configuration or I/O error).
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace tabcheck
