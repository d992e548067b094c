#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace tenet::cli {

enum ExitCode { ok = 0, usage = 1, input_error = 2, internal_error = 3 };

/// Entry point shared by the executable and the tests; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::istream& in, std::ostream& out, std::ostream& err);

}  // namespace tenet::cli
