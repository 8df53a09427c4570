#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace altbd::cli {

/// Exit statuses of the `altbd` tool.
enum Exit : int {
  kOk = 0,
  kUsage = 1,
  kModel = 2,
  kNegative = 3,  // NotErgodic / Explosive
  kInconclusive = 4,
  kNumerical = 5,
};

/// Runs one invocation. `args` excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace altbd::cli
