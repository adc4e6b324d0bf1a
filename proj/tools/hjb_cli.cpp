#include "hjb/cli/commands.hpp"
#include "hjb/cli/config.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>
#include <string>

int main(int argc, char** argv) {
  CLI::App app{"Quasilinear elliptic HJB solvers and Monte Carlo checks"};
  std::string command;
  std::string config_path;
  std::string output_dir;
  std::optional<std::uint64_t> seed;
  bool quiet = false;
  app.add_option("command", command,
                 "exact, radial, grid2d, monotone, simulate, regime, verify or all");
  app.add_option("--config", config_path, "JSON run configuration")->check(CLI::ExistingFile);
  app.add_option("--output", output_dir, "output directory (overrides the config)");
  app.add_option("--seed", seed, "random seed (overrides the config)");
  app.add_flag("--quiet", quiet, "print nothing but errors");
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  hjb::cli::RunConfig cfg;
  try {
    if (!config_path.empty()) cfg = hjb::cli::load_config(config_path);
    if (!command.empty()) {
      if (!hjb::cli::is_command(command)) {
        throw hjb::cli::ConfigError("unknown command '" + command + "'");
      }
      if (!cfg.command.empty() && cfg.command != command) {
        throw hjb::cli::ConfigError("command '" + command + "' conflicts with config command '" +
                                    cfg.command + "'");
      }
      cfg.command = command;
      hjb::cli::validate_parameters(cfg.command, cfg.parameters);
    }
    if (cfg.command.empty()) throw hjb::cli::ConfigError("no command given");
    if (!output_dir.empty()) cfg.output_dir = output_dir;
    if (seed) cfg.seed = *seed;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return hjb::cli::run(cfg, quiet, std::cout, std::cerr);
}
