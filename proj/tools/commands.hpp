#pragma once

#include <iosfwd>

namespace mpass::cli {

enum ExitCode : int { Ok = 0, AxiomFail = 1, DomainFail = 2, BadInput = 3 };

/// Parses and runs one command line, writing the report to `out` and
/// diagnostics to `err`. Returns the process exit status.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace mpass::cli
