#pragma once

#include <string>
#include <vector>

namespace refcalib {

// Exit codes of the command-line tool.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInternal = 1;
inline constexpr int kExitInput = 2;
inline constexpr int kExitInsufficient = 3;

// Runs the `refcalib` command line. Diagnostics go to stderr.
int cli_main(int argc, const char* const* argv);
int cli_main(const std::vector<std::string>& args);

}  // namespace refcalib
