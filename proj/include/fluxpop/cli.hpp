#pragma once

#include <string>
#include <vector>

namespace fluxpop::cli {

/// Full command-line entry point. Exit codes: 0 success, 1 pipeline or
/// numeric failure, 2 usage or input failure.
int run_cli(int argc, const char* const* argv);

/// Convenience for in-process driving: args exclude the program name.
int run_cli(const std::vector<std::string>& args);

} // namespace fluxpop::cli
