#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace qdag::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kInputFormat = 2,
  kSemantic = 3,
};

/// Runs `qdagc` with `args` (args[0] is the program name).
int run(const std::vector<std::string>& args, std::istream& in, std::ostream& out,
        std::ostream& err);

}  // namespace qdag::cli
