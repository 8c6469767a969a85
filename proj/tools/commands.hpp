#pragma once

#include "cli_support.hpp"

#include <functional>
#include <string>
#include <vector>

namespace lagcarma::cli {

struct RunConfig {
  std::string output;
  int verbosity = 0;
};

using Action = std::function<void(const RunConfig&)>;

struct Command {
  CLI::App* app;
  Action run;
};

/// Registers every subcommand on `app`; the action of the selected leaf runs after parsing.
std::vector<Command> register_commands(CLI::App& app);

}  // namespace lagcarma::cli
