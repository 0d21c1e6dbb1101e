#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace uavmec::cli {

enum ExitCode : int { kOk = 0, kFailure = 1, kInfeasible = 2 };

/// Entry point of the `uavmec` tool. `args` excludes the program name.
/// Relative output paths resolve against $UAVMEC_OUT_DIR when it is set.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses "1,2,5" and inclusive ranges such as "1..10" (mixed freely).
std::vector<unsigned long long> parse_seed_list(const std::string& text);

}  // namespace uavmec::cli
