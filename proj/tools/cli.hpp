#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace zscreen::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;        // I/O, parse or usage errors
inline constexpr int kExitStatistical = 3;  // ineligible data or domain violations

// args excludes the program name.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace zscreen::cli
