#pragma once

#include <iosfwd>
#include <map>
#include <string>

namespace ratelens::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitNotConverged = 3;

// Entry point shared by the `ratelens` binary and the tests. Never throws;
// every failure maps to an exit code with a diagnostic on `err`.
int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

// Flat `key = value` config file; '#' starts a comment. Throws
// ratelens::ParseError on malformed lines.
std::map<std::string, std::string> read_config_file(const std::string& path);

}  // namespace ratelens::cli
