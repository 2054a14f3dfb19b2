#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Greedy sparse optimization over atomic sets: experiment harness"};
  std::string command;
  std::string config;
  atomgreed::cli::Overrides ov;
  std::uint64_t seed = 0;
  int trials = 0;
  std::string out;

  app.add_option("command", command, "recover | condnum | submod | bounds-check")
      ->required()
      ->check(CLI::IsMember({"recover", "condnum", "submod", "bounds-check"}));
  app.add_option("--config", config, "JSON experiment config")->required();
  auto* seed_opt = app.add_option("--seed", seed, "master seed (overrides config)");
  auto* trials_opt = app.add_option("--trials", trials, "trial count (overrides config)")->check(CLI::PositiveNumber);
  auto* out_opt = app.add_option("--out", out, "output path (overrides config)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : atomgreed::cli::kConfigError;
  }
  if (*seed_opt) ov.seed = seed;
  if (*trials_opt) ov.trials = trials;
  if (*out_opt) ov.out = out;
  return atomgreed::cli::run(command, config, ov, std::cerr);
}
