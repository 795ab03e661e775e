#pragma once

#include <map>
#include <string>
#include <vector>

namespace pertlag::cli {

inline constexpr const char* kToolName = "hp";
inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

// Exit codes.
inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitWarning = 2;
inline constexpr int kExitUsage = 64;

// Parsed command line: the command and every option of it as text, defaults
// filled in. This is what the envelope echoes, and feeding it back through
// --config reproduces the run.
struct RunConfig {
  std::string command;
  std::map<std::string, std::string> options;
};

// args excludes the program name. Writes one envelope to --out (stdout when
// absent) and returns the exit code.
int run(const std::vector<std::string>& args);

}  // namespace pertlag::cli
