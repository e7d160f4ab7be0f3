#pragma once

#include <string>
#include <vector>

namespace singdet::cli {

// Dispatch a full command line (excluding argv[0]).  Returns the process
// exit code: 0 success, 1 usage error, 2 numerical failure.
int run(const std::vector<std::string>& args);
int run(int argc, const char* const* argv);

}  // namespace singdet::cli
