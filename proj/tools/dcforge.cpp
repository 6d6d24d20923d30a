#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dcforge/cli/battery.hpp"
#include "dcforge/cli/commands.hpp"

int main(int argc, char** argv) {
  using namespace dcforge::cli;
  CLI::App app{"Frank-Wolfe and CCCP experiment runner"};
  app.require_subcommand(1);

  std::string config_path;
  RunOverrides overrides;
  std::optional<int> max_iters;
  std::optional<double> gap_tol;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  auto* run = app.add_subcommand("run", "Solve the instance described by a config file");
  run->add_option("config", config_path, "Config file (key = value lines)")->required();
  run->add_option("--max-iters", max_iters, "Outer iterations");
  run->add_option("--gap-tol", gap_tol, "Stop once the gap is at most this value (0 disables)");
  run->add_option("--seed", seed, "Seed for seeded instance families");
  run->add_option("--out", out_dir, "Output directory");

  std::string suite;
  auto* verify = app.add_subcommand("verify", "Run a certificate battery over the instance zoo");
  verify->add_option("suite", suite, "equivalence, rates, connections or all")->required();

  std::string trace_dir;
  auto* report = app.add_subcommand("report", "Summarize a trace directory");
  report->add_option("dir", trace_dir, "Directory containing trace.csv")->required();

  std::string demo_name;
  auto* demo = app.add_subcommand("demo", "Run one of the reduction demos");
  demo->add_option("name", demo_name, "ppm, mirror, proxgrad, dualprox or fwascccp")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : exit_config_error;
  }

  setup_logging();
  if (run->parsed()) {
    overrides.max_iters = max_iters;
    overrides.gap_tol = gap_tol;
    overrides.seed = seed;
    overrides.output_dir = out_dir;
    return run_command(config_path, overrides, std::cout);
  }
  if (verify->parsed()) return verify_command(suite, std::cout);
  if (report->parsed()) return report_command(trace_dir, std::cout);
  if (demo->parsed()) return demo_command(demo_name, std::cout);
  return exit_config_error;
}
