#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sinkchain::cli {

enum ExitCode : int {
  kOk = 0,
  kUsage = 2,
  kNotConverged = 3,
  kBracketFailure = 4,
};

/// Entry point of the `sinkchain` command; args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sinkchain::cli
