#include "commands.hpp"

#include "lagcarma/errors.hpp"

#include <iostream>
#include <string>

int main(int argc, char** argv) {
  using namespace lagcarma::cli;
  CLI::App app{"Gauss-Laguerre transition densities, estimation and pricing for TCBm-CARMA models", "lagcarma"};
  app.require_subcommand(1);
  app.fallthrough();
  RunConfig run;
  app.add_option("-o,--output", run.output, "Write results to FILE instead of stdout");
  app.add_flag("-v,--verbose", run.verbosity, "Progress messages on stderr");
  const auto commands = register_commands(app);

  // CLI11 reports a stray first word as a missing subcommand; name it instead.
  for (int i = 1; i < argc; ++i) {
    const std::string word = argv[i];
    if (word == "-o" || word == "--output") {
      ++i;
      continue;
    }
    if (word.empty() || word[0] == '-') continue;
    if (app.get_subcommand_no_throw(word) == nullptr) {
      std::cerr << "usage error: unknown subcommand '" << word << "'\nRun with --help for more information.\n";
      return 2;
    }
    break;
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    std::cerr << "usage error: " << e.what() << "\nRun with --help for more information.\n";
    return 2;
  }

  try {
    for (const auto& c : commands) {
      if (c.app->parsed()) {
        c.run(run);
        return 0;
      }
    }
    std::cerr << "usage error: no subcommand selected\n";
    return 2;
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const lagcarma::DataError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
