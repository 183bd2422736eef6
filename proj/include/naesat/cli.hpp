#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace naesat::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitInput = 2;
inline constexpr int kExitNumeric = 3;

const char* version();

// Parses argv (argv[0] is the program name) and runs one verb. Output goes to
// `out`, diagnostics to `err`; the return value is the process exit code.
int run(const std::vector<std::string>& argv, std::ostream& out, std::ostream& err);

}  // namespace naesat::cli
