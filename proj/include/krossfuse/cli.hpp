#pragma once

#include <ostream>
#include <string>
#include <vector>

// Command-line surface. Subcommands: fuse, kernel, cluster, probe, validate,
// synth, sweep. Exit codes: 0 success, 1 a validation criterion failed,
// 2 usage error or unusable input (malformed file, capacity exceeded).

namespace krossfuse {

inline constexpr int kExitOk = 0;
inline constexpr int kExitCriterion = 1;
inline constexpr int kExitUsage = 2;

int cli_main(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// `args` excludes the program name.
int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace krossfuse
