#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace steklov::cli {

// Exit codes
inline constexpr int kOk = 0;
inline constexpr int kIoError = 1;
inline constexpr int kInvalidInput = 2;
inline constexpr int kSolverFailure = 3;

/// Runs the command line `args` (without the program name) and returns the exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace steklov::cli
