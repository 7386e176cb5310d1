#pragma once

#include <ostream>

namespace corrsel {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitData = 3;
inline constexpr int kExitComputation = 4;

// Commands: select, diagnose, experiment, synth.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace corrsel
