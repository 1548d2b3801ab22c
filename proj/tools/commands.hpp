#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace ococlus::cli {

/// Exit codes: 0 success, 2 usage or input error, 1 internal failure.
inline constexpr int kOk = 0;
inline constexpr int kInternalError = 1;
inline constexpr int kInputError = 2;

/// Runs `ococlus <subcommand> ...`. args[0] is the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace ococlus::cli
