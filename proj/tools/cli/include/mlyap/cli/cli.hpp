#pragma once

#include <iosfwd>
#include <span>
#include <string>

namespace mlyap::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitVerifyFailed = 1;
inline constexpr int kExitConfigError = 2;

/// Runs one command. `args` excludes the program name. Tables and records go
/// to `out` unless --out names a file; diagnostics go to `err`.
int run(std::span<const std::string> args, std::ostream& out, std::ostream& err);

} // namespace mlyap::cli
