#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "pedflow/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Stop-and-go pedestrian flow: stochastic micro ensembles and macro densities"};
  app.require_subcommand(1);

  pedflow::CommandOptions options;
  std::string scenario;
  std::string out;
  std::uint64_t seed = 0;
  std::vector<double> snapshots;

  for (const char* name : {"micro", "macro", "compare", "validate"}) {
    CLI::App* sub = app.add_subcommand(name);
    sub->add_option("--scenario", scenario, "Scenario file (JSON)")->required();
    sub->add_option("--seed", seed, "Master seed (overrides the scenario)");
    sub->add_option("--out", out, "Output directory (overrides PEDFLOW_OUT and the scenario)");
    sub->add_option("--workers", options.workers, "Worker threads for micro replicates")
        ->check(CLI::PositiveNumber);
    sub->add_option("--snapshots", snapshots, "Snapshot times, comma separated")->delimiter(',');
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : pedflow::kExitValidation;
  }

  options.subcommand = app.get_subcommands().front()->get_name();
  const CLI::App* sub = app.get_subcommands().front();
  options.scenario = scenario;
  if (sub->count("--seed") > 0) options.seed = seed;
  if (sub->count("--out") > 0) options.out = out;
  if (sub->count("--snapshots") > 0) options.snapshots = snapshots;
  return pedflow::run_command(options, std::cout, std::cerr);
}
