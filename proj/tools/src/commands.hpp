#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace rankverify::cli {

/// Exit codes shared by all subcommands.
inline constexpr int kExitPositive = 0;  // rejected / informative bound / ran
inline constexpr int kExitNegative = 1;  // did not reject / bound is -inf
inline constexpr int kExitError = 2;
inline constexpr int kExitInsufficientConditioning = 3;

/// Runs `rank-verify <args...>` (args exclude the program name). Reports go
/// to `out`; errors are written to `err` as a one-line JSON object.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace rankverify::cli
