#pragma once

#include <cstdint>
#include <iosfwd>
#include <string_view>

namespace steklame::cli {

enum ExitCode : int {
  success = 0,
  numerical_failure = 1,
  configuration_error = 2,
};

/// Entry point of the `steklame` executable. Writes results to `out` (or to
/// files named by options) and diagnostics to `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

/// 64-bit FNV-1a hash, used to tag CSV outputs with the effective config.
std::uint64_t fnv1a(std::string_view text);

}  // namespace steklame::cli
