#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace opinionrank::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;

// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "OPINIONRANK_OUTPUT_DIR";

// Runs one invocation. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace opinionrank::cli
