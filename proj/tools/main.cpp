#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"

int main(int argc, char** argv) {
  using gmf::cli::CommandOptions;
  CLI::App app{"Gaussian mixture filter benchmarks: tricyclist Monte Carlo, synthetic radio localization, log replay"};
  app.require_subcommand(1);
  app.footer(
      "Flags for every subcommand: --config <path> (required), --seed <u64>, --runs <n>, --out <dir>,\n"
      "--jobs <n>, --overwrite. sim-radio also takes --log-only; replay requires --log <path>.\n"
      "Exit codes: 0 success, 1 runtime failure, 2 usage or config error.");

  CommandOptions options;
  std::uint64_t seed = 0;
  std::size_t runs = 0;
  std::string out;
  int jobs = 0;

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", options.config, "Experiment config (JSON)")->required();
    cmd->add_option("--seed", seed, "Base seed; run i uses seed ^ i");
    cmd->add_option("--runs", runs, "Number of Monte Carlo runs")->check(CLI::PositiveNumber);
    cmd->add_option("--out", out, "Output directory (relative to the working directory)");
    cmd->add_option("--jobs", jobs, "Worker threads; 0 uses every core")->check(CLI::NonNegativeNumber);
    cmd->add_flag("--overwrite", options.overwrite, "Reuse a non-empty output directory");
  };

  auto* bench = app.add_subcommand("bench-tricyclist", "Monte Carlo runs of every configured filter on the tricyclist");
  add_common(bench);
  auto* sim = app.add_subcommand("sim-radio", "Generate radio logs for each mission and run every configured filter");
  add_common(sim);
  sim->add_flag("--log-only", options.log_only, "Write the measurement logs and stop");
  auto* rep = app.add_subcommand("replay", "Run every configured filter on a measurement log");
  add_common(rep);
  rep->add_option("--log", options.log, "Measurement log CSV (t,robot_x,robot_y,snr)")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gmf::cli::kUsageError;
  }

  for (auto* cmd : {bench, sim, rep}) {
    if (cmd->count("--seed") > 0) {
      options.seed = seed;
    }
    if (cmd->count("--runs") > 0) {
      options.runs = runs;
    }
    if (cmd->count("--out") > 0) {
      options.out = out;
    }
    if (cmd->count("--jobs") > 0) {
      options.jobs = jobs;
    }
  }

  if (bench->parsed()) {
    return gmf::cli::cmd_bench_tricyclist(options, std::cout, std::cerr);
  }
  if (sim->parsed()) {
    return gmf::cli::cmd_sim_radio(options, std::cout, std::cerr);
  }
  return gmf::cli::cmd_replay(options, std::cout, std::cerr);
}
