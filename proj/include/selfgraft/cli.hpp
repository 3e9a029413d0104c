#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace selfgraft {

enum ExitCode : int { kOk = 0, kSemantic = 1, kConstruction = 2, kInputOutput = 3 };

/// Runs one `selfgraft` command. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace selfgraft
