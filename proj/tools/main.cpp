#include <iostream>

#include <CLI11.hpp>

#include "fdsm/cli.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Fixed-point delayed subgradient solver and inpainting experiments"};
  app.require_subcommand(1);

  fdsm::cli::Flags flags;
  std::string config, out;
  std::uint64_t seed = 0;
  std::size_t jobs = 1;

  const std::pair<const char*, const char*> commands[] = {
      {"inpaint", "Restore a damaged image"},
      {"sweep", "Run the (transform, tau, a, a0) parameter grid"},
      {"bound", "Print a rate-bound curve as CSV"},
      {"distributed", "Run the multi-worker scenario"},
      {"selftest", "Run the operator, oracle and transform checks"},
  };
  for (const auto& [name, help] : commands) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", config, "Config file (key = value lines)")->check(CLI::ExistingFile);
    sub->add_option("--seed", seed, "Random seed");
    sub->add_option("--jobs", jobs, "Concurrent runs")->check(CLI::PositiveNumber);
    sub->add_flag("--trace", flags.trace, "Write per-iteration trace CSVs");
    sub->add_option("--out", out, "Output directory");
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? 0 : 1;
  }

  const auto* sub = app.get_subcommands().front();
  if (sub->count("--config")) flags.config = config;
  if (sub->count("--seed")) flags.seed = seed;
  if (sub->count("--jobs")) flags.jobs = jobs;
  if (sub->count("--out")) flags.out = out;
  return fdsm::cli::dispatch(sub->get_name(), flags, std::cout, std::cerr);
}
