#pragma once

// The uhinet executable: one subcommand per pipeline stage, each reading and
// writing files only.
//
// Exit codes: 0 success, 1 usage or configuration, 2 data/format errors,
// 3 numeric failure.

namespace uhinet::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitData = 2;
inline constexpr int kExitNumeric = 3;

int run(int argc, char** argv);

}  // namespace uhinet::cli
