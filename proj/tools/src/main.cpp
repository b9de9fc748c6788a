#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "smfg_cli/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Stationary mean-field game solver with Signorini exit conditions"};
  app.set_version_flag("--version", SMFG_VERSION);
  app.require_subcommand(1);

  smfg::cli::CommandOptions opts;
  std::string output;
  std::uint64_t seed = 0;

  const auto add = [&](const std::string& name, const std::string& help) {
    auto* sub = app.add_subcommand(name, help);
    sub->add_option("--config", opts.config, "Configuration file")->required()->check(CLI::ExistingFile);
    sub->add_option("--output", output, "Output directory (overrides output_dir)");
    sub->add_option("--seed", seed, "Random seed (overrides seed)");
    sub->add_flag("--quiet", opts.quiet, "Suppress progress output");
    return sub;
  };
  auto* run = add("run", "Solve every epsilon stage and write solution, boundary and diagnostics CSVs");
  auto* compare = add("oracle-compare", "Compare a 1D solve against the semi-analytic solution");
  auto* sweep = add("sweep", "Fit penalty-limit rates over the epsilon schedule");
  auto* check = add("check", "Probe structural assumptions, monotonicity and the energy gradient");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : smfg::cli::kConfigError;
  }

  for (auto* sub : {run, compare, sweep, check}) {
    if (sub->count("--output")) opts.output = output;
    if (sub->count("--seed")) opts.seed = seed;
  }

  if (run->parsed()) return smfg::cli::cmd_run(opts, std::cout, std::cerr);
  if (compare->parsed()) return smfg::cli::cmd_oracle_compare(opts, std::cout, std::cerr);
  if (sweep->parsed()) return smfg::cli::cmd_sweep(opts, std::cout, std::cerr);
  return smfg::cli::cmd_check(opts, std::cout, std::cerr);
}
