#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace cefrsimp::cli {

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;

/// Runs one invocation. `args` excludes the program name.
/// Returns 0 on success, 2 on usage errors, 1 on any other failure.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace cefrsimp::cli
