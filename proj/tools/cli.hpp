#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace harnack::cli {

inline constexpr int exit_ok = 0;
inline constexpr int exit_failure = 1;
inline constexpr int exit_usage = 2;

/// Entry point of the harnack_lab tool. Returns the process exit code.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);
int run_cli(int argc, char** argv);

} // namespace harnack::cli
