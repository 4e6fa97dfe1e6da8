#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace nlki {

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitValidation = 1;
inline constexpr int kExitTransport = 2;

// Entry point of the `nlki` binary; `args` excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace nlki
