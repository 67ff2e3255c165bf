#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pfi::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;  // a check ran and did not hold
inline constexpr int kExitUsage = 2;   // bad flags, unreadable or invalid input

/// Runs one subcommand. args excludes the program name. The JSON report goes
/// to out; with --verbose a short summary goes to err.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace pfi::cli
