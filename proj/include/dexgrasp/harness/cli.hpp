#pragma once

#include <iosfwd>

namespace dexgrasp::harness {

enum ExitCode { kOk = 0, kConfigError = 2, kNumericFailure = 3 };

/// Entry point of the command-line tool; returns the process exit code.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace dexgrasp::harness
