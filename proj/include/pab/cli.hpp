#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace pab::cli {

inline constexpr int kExitSuccess = 0;
inline constexpr int kExitParse = 2;   // bad flags, malformed files, schema violations
inline constexpr int kExitDomain = 3;  // arguments outside an operation's domain
inline constexpr int kExitIo = 4;      // unreadable or unwritable paths

/// Full command dispatch. `args` excludes the program name. Reported
/// non-convergence and failed certificates are results, not errors, and exit
/// with code 0.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

int run(int argc, const char* const* argv);

}  // namespace pab::cli
