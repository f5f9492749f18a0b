#pragma once

#include <iosfwd>

namespace archner::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

/// Entry point of the `archner` command. Returns the process exit code:
/// 0 on success, 1 for data errors, 2 for usage errors.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace archner::cli
