#include <CLI11.hpp>
#include <cstdint>
#include <string>

#include "hwave/hwave.h"

int main(int argc, char** argv) {
  CLI::App app{"Shifted wave equation on H^2: propagation, Picard solving, decay, blow-up"};
  app.require_subcommand(1, 1);
  std::string config, out = ".";
  std::uint64_t seed = 0;

  for (const char* name : {"propagate", "solve", "decay", "contraction", "blowup", "certify"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--config", config, "key = value file with [section] headers")
        ->required()
        ->check(CLI::ExistingFile);
    sub->add_option("--out", out, "output directory (created if missing)");
    sub->add_option("--seed", seed, "random seed for the contraction probes");
  }
  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  const CLI::App* sub = app.get_subcommands().front();
  const std::string command = sub->get_name();
  hwave_run_request req{};
  req.command = command.c_str();
  req.config_path = config.c_str();
  req.out_dir = out.c_str();
  req.has_seed = sub->count("--seed") > 0;
  req.seed = seed;
  return hwave_run(&req);
}
