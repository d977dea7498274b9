#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace baycount {

/// Entry point of the `baycount` tool. `args` excludes the program name.
/// Returns the process exit status.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// threads <= 0 resolves to the number of hardware threads.
int resolve_threads(int threads);

}  // namespace baycount
