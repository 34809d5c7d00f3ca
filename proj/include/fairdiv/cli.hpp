#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fairdiv/core.hpp"

namespace fairdiv::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitFailed = 1;  // ran, but the result misses its contract
inline constexpr int kExitUsage = 2;   // bad flags or input

/// Runs one command line (without the program name). The report goes to
/// `out`, diagnostics to `err`; returns the process exit code.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// "a=2,b=1" keyed by group label. Every group must get a quota.
FairnessSpec parse_quotas(const Dataset& data, const std::string& text);

}  // namespace fairdiv::cli
