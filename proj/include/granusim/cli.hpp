#pragma once

#include <iosfwd>

namespace granusim {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitRuntime = 2;

/// Entry point of the `granusim` tool: generate, run, experiment, analyze, recommend.
int dispatch(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace granusim
