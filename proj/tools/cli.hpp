#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace zolab::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInputError = 2;
inline constexpr int kExitResourceRefusal = 3;

// Runs one command line (args excludes the program name). Documents go to
// `out`, or to --out when given; errors go to `err` as one JSON line.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

}  // namespace zolab::cli
