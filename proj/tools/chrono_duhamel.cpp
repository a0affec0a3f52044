#include <CLI11.hpp>

#include <cstdlib>
#include <iostream>

#include "chrono_duhamel/driver.hpp"

namespace cd = chrono_duhamel;

int main(int argc, char** argv) {
  CLI::App app{"Chronological-exponential tools for Duhamel flows of semilinear dispersive equations"};
  std::string command;
  std::string config_path;
  std::string out_dir;
  std::uint64_t seed = 0;

  app.add_option("command", command, "propagate | evolve | invariance | certify | trees | selftest")
      ->required()
      ->check(CLI::IsMember(cd::command_names()));
  auto* cfg = app.add_option("--config", config_path, "run configuration file");
  auto* out = app.add_option("--out", out_dir, "output directory (default: CHRONO_DUHAMEL_OUT or [run] out)");
  auto* seed_opt = app.add_option("--seed", seed, "random seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? cd::kExitOk : cd::kExitConfig;
  }

  cd::RunConfig config;
  if (cfg->count() > 0) {
    try {
      config = cd::load_config(config_path);
    } catch (const cd::ConfigError& e) {
      std::cerr << "config error: " << e.what() << '\n';
      return cd::kExitConfig;
    }
  } else if (command != "selftest") {
    std::cerr << "config error: --config is required for '" << command << "'\n";
    return cd::kExitConfig;
  }

  if (out->count() > 0) {
    config.out_dir = out_dir;
  } else if (const char* env = std::getenv("CHRONO_DUHAMEL_OUT"); env && *env) {
    config.out_dir = env;
  }
  if (seed_opt->count() > 0) config.seed = seed;

  return cd::run(command, config, std::cout);
}
