#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sai::cli {

enum ExitCode : int {
  kOk = 0,
  kConfigError = 2,
  kNumericalFailure = 3,
};

/// Runs the command line front end. args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace sai::cli
