#pragma once

namespace lccf {

inline constexpr int exit_ok = 0;
inline constexpr int exit_config = 2;
inline constexpr int exit_data = 3;
inline constexpr int exit_numeric = 4;

/// Entry point of the `lccf` tool. Returns the process exit code.
int run_cli(int argc, const char* const* argv);

}  // namespace lccf
