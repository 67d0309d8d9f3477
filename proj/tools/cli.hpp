#pragma once

#include <iosfwd>

namespace pyramid::cli {

// Exit codes of pyramid-sim.
inline constexpr int kOk = 0;
inline constexpr int kConfigError = 1;
inline constexpr int kOracleMismatch = 2;
inline constexpr int kInvariantViolation = 3;

// Relative tolerance of theory-check.
inline constexpr double kOracleTolerance = 1e-9;

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

}  // namespace pyramid::cli
