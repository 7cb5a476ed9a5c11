#pragma once

#include <ostream>

namespace niplab::cli {

enum ExitCode : int {
  exit_pass = 0,
  exit_claim_failed = 1,
  exit_invalid_config = 2,
  exit_numerical_failure = 3,
};

/// Runs one `niplab` command line. Data goes to --out (or `out`), diagnostics
/// to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace niplab::cli
