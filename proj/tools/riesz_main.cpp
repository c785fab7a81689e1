#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "riesz/cli/runner.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Bochner-Riesz multiplier experiments"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", "riesz 0.1.0");

  riesz::cli::RunOptions options;
  std::string out_dir = ".";
  std::uint64_t seed = 0;
  for (const auto& name : riesz::cli::subcommands()) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", options.config_path, "config file (key = value)")->required();
    sub->add_option("--set", options.overrides, "override a config key, key=value")->take_all();
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--workers", options.workers, "worker threads")->check(CLI::PositiveNumber);
    sub->add_option("--seed", seed, "seed for random test fields");
    sub->callback([&options, name] { options.command = name; });
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : riesz::cli::exit_usage;
  }
  options.out_dir = out_dir;
  for (const auto* sub : app.get_subcommands())
    if (sub->count("--seed")) options.seed = seed;
  return riesz::cli::run(options, std::cerr);
}
