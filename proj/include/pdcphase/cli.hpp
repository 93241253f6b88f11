#pragma once

#include <string>
#include <vector>

namespace pdcphase::cli {

inline constexpr const char* kVersion = "0.1.0";

/// Runs one subcommand. Returns 0 on success, 1 on computation errors
/// (bad cutoffs, out-of-range physics parameters), 2 on usage errors.
int dispatch(int argc, const char* const* argv);

/// Same, from bare arguments (no program name). Used by the tests.
int dispatch(const std::vector<std::string>& args);

}  // namespace pdcphase::cli
