// Command-line front end. Every subcommand prints a JSON report (schema 1)
// or CSV; exit codes are 0 success, 1 check failed, 2 usage or input error.
#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace qtele::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitUsage = 2;

/// `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace qtele::cli
