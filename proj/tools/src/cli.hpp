#pragma once

#include <ostream>

namespace ionlogic::cli {

enum ExitCode : int { kOk = 0, kConfigError = 2, kRuntimeError = 3 };

/// Full command-line entry point. The one-line summary goes to `out`,
/// diagnostics and usage to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace ionlogic::cli
