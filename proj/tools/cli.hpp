#pragma once

namespace latact::cli {

// Exit codes are a stable contract for CI:
//   0 success, 2 usage/input error, 3 property violation found by audit,
//   4 certifier tolerance alert (no witness found), 1 runtime failure.
inline constexpr int kExitOk = 0;
inline constexpr int kExitRuntime = 1;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitViolation = 3;
inline constexpr int kExitToleranceAlert = 4;

int run(int argc, const char* const* argv);

}  // namespace latact::cli
