#include <cstdint>
#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "pllab/harness.hpp"

int main(int argc, char** argv) {
  CLI::App app{"pllab: numerical laboratory for gradient-domination checks"};
  app.require_subcommand(1);

  std::string config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out;
  int jobs = 0;  // 0 = logical cores

  CLI::App* run = app.add_subcommand("run", "execute one experiment config");
  run->add_option("config", config_path, "JSON experiment config")
      ->required()
      ->check(CLI::ExistingFile);
  run->add_option("--seed", seed, "override the config seed");
  run->add_option("--out", out, "override the output directory");
  run->add_option("--jobs", jobs, "worker threads (0 = logical cores)");

  bool list_only = false;
  CLI::App* suite = app.add_subcommand("suite", "run the built-in acceptance suite");
  suite->add_flag("--list", list_only, "print criterion identifiers and exit");
  suite->add_option("--seed", seed, "suite seed (default 42)");
  suite->add_option("--out", out, "output directory (default pllab_out)");
  suite->add_option("--jobs", jobs, "worker threads (0 = logical cores)");

  CLI::App* cat = app.add_subcommand("catalogue", "list built-in fields");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? pllab::kExitPass : pllab::kExitConfigError;
  }

  pllab::RunOptions opts;
  opts.seed = seed;
  opts.out = out;
  opts.jobs = jobs;

  if (run->parsed()) return pllab::run_config_file(config_path, opts);
  if (suite->parsed()) return pllab::run_suite(opts, list_only);
  if (cat->parsed()) return pllab::print_catalogue();
  return pllab::kExitConfigError;
}
