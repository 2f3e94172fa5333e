#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fanlab/cli/config.hpp"

namespace fanlab::cli {

enum ExitCode : int { kOk = 0, kInternal = 1, kConfig = 2, kAssertion = 3 };

struct CommandResult {
  int exit_code = kOk;
  std::vector<std::filesystem::path> files;  // in the order written
  std::string summary;                       // short human-readable report
};

// Runs a subcommand on a resolved configuration. Throws ConfigError for bad
// values; other exceptions escape to main_entry.
CommandResult run_command(const std::string& command, const json& cfg);

// argv handling, error reporting and exit codes for the fanlab binary.
int main_entry(int argc, char** argv);

}  // namespace fanlab::cli
