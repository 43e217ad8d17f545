#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "faceval/error.hpp"

namespace faceval::cli {

/// Process exit codes.
enum ExitCode : int {
  kOk = 0,
  kUsage = 1,
  kFormat = 2,
  kDegenerate = 3,
  kPartialBatch = 4,
};

int exit_code_for(ErrorCode code) noexcept;

/// Runs one command line (without the program name). Results go to `out`,
/// diagnostics to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace faceval::cli
