#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace hfm {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInvalidScenario = 1;
inline constexpr int kExitDiverged = 2;
inline constexpr int kExitUsage = 64;

/// Entry point of the `hfm_sim` tool. `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace hfm
