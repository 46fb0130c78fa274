#pragma once

#include <iosfwd>

namespace aagame::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitDataError = 1;
inline constexpr int kExitUsage = 2;

// Entry point of the `aagame` tool: synth | run | windows | pvalues.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace aagame::cli
