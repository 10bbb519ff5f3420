// Declarative experiment runner for stochastic metamorphosis scenarios.
//
// Usage:
//   metamorph run <config.json> [--out DIR] [--seed N] [--quiet]
//   metamorph validate <config.json>
//   metamorph schema
//
// Exit codes: 0 success, 2 validation failure, 3 runtime failure.
// METAMORPH_THREADS caps the worker count.

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>

#include "metamorph/config.hpp"
#include "metamorph/errors.hpp"
#include "metamorph/io.hpp"
#include "metamorph/scenario.hpp"

int main(int argc, char** argv) {
  CLI::App app{"stochastic metamorphosis experiment runner"};
  app.require_subcommand(1);

  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;
  bool seed_set = false;
  bool quiet = false;

  CLI::App* run = app.add_subcommand("run", "execute a scenario config");
  run->add_option("config", config_path, "path to config JSON")->required();
  run->add_option("--out", out_dir, "output directory override");
  run->add_option("--seed", seed, "base seed override")->each([&](const std::string&) {
    seed_set = true;
  });
  run->add_flag("--quiet", quiet, "suppress progress output");

  CLI::App* validate = app.add_subcommand("validate", "parse and validate a config");
  validate->add_option("config", config_path, "path to config JSON")->required();

  CLI::App* schema = app.add_subcommand("schema", "print the config JSON schema");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (schema->parsed()) {
      std::cout << metamorph::config_schema_json() << "\n";
      return 0;
    }

    metamorph::ExperimentConfig config;
    try {
      config = metamorph::load_config_file(config_path);
    } catch (const metamorph::ConfigError& e) {
      std::cerr << "validation error: " << e.what() << "\n";
      return 2;
    }

    if (validate->parsed()) {
      for (const std::string& w : config.warnings) {
        std::cerr << "warning: " << w << "\n";
      }
      std::cout << "ok: " << metamorph::to_string(config.scenario) << "\n";
      return 0;
    }

    metamorph::RunOptions options;
    options.out_dir_override = out_dir;
    if (seed_set) options.seed_override = seed;
    options.quiet = quiet;
    if (!quiet) {
      for (const std::string& w : config.warnings) {
        std::cerr << "warning: " << w << "\n";
      }
    }
    const metamorph::RunManifest manifest = metamorph::run_scenario(config, options);
    if (!quiet) {
      std::cout << "scenario " << metamorph::to_string(config.scenario) << " -> "
                << manifest.directory << " (" << manifest.output_files.size()
                << " files, " << metamorph::format_double(manifest.wall_time_s)
                << " s)\n";
    }
    return 0;
  } catch (const metamorph::ConfigError& e) {
    std::cerr << "validation error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "runtime error: " << e.what() << "\n";
    return 3;
  }
}
