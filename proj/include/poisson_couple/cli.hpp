#pragma once

#include <iosfwd>

namespace pcouple::cli {

inline constexpr const char* kVersion = "1.0.0";

enum ExitCode : int { kSuccess = 0, kFailure = 1, kUsage = 2 };

/// Entry point of the `poisson-couple` tool; returns the process exit code.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pcouple::cli
