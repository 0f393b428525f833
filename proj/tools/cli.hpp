#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "uexp/sample.hpp"

namespace uexp::cli {

// Exit codes, stable across versions.
inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitDomain = 3;
inline constexpr int kExitNumerical = 4;

/// Runs the command line `args` (args[0] is the program name). Reports go to `out`
/// unless --out names a file; diagnostics go to `err`.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Parses a data file: one positive decimal per line, blank lines and lines starting
/// with '#' ignored. Throws InputError naming the line on bad content.
Sample read_data_file(const std::string& path);

/// Same rules applied to text already in memory.
Sample parse_data(const std::string& text);

}  // namespace uexp::cli
