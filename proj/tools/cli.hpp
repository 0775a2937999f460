#pragma once

#include <ostream>

namespace blobtrack::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Full command line including argv[0]. Writes reports to `out` and one-line
// diagnostics to `err`; returns the process exit status.
int parse_and_run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace blobtrack::cli
