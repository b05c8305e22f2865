#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace anchormatch::cli {

/// Runs the command line `args` (args[0] is the program name).
/// Exit codes: 0 success, 1 usage error, 2 runtime error.
int cli_main(std::span<const std::string> args, std::ostream& out, std::ostream& err);

}  // namespace anchormatch::cli
