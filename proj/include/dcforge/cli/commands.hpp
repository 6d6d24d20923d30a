#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "dcforge/analysis.hpp"
#include "dcforge/cli/config.hpp"

namespace dcforge::cli {

/// Reads DCFORGE_LOG (quiet, info or trace; default info) and configures the stderr logger.
void setup_logging();

/// Command-line values that replace config entries.
struct RunOverrides {
  std::optional<int> max_iters;
  std::optional<double> gap_tol;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output_dir;
};

void apply_overrides(RunConfig& config, const RunOverrides& overrides);

struct RunResult {
  int exit_code = exit_ok;
  std::string message;
  IterateTrace trace;
  std::vector<Certificate> certificates;
};

/// Solves the configured instance and writes trace.csv, certificates.txt and run_meta.txt
/// into config.output_dir. Exit code 0 iff every requested certificate passes.
RunResult run(const RunConfig& config);
int run_command(const std::string& config_path, const RunOverrides& overrides, std::ostream& out);

/// Runs a battery and prints the table; exit 0 iff every check passes, 1 otherwise
/// (2 for an unknown suite).
int verify_command(const std::string& suite, std::ostream& out);

/// Writes summary.md and gap_vs_bound.dat next to trace.csv; exit 2 on a missing or corrupt trace.
int report_command(const std::string& trace_dir, std::ostream& out);

/// Prints the demo's iterates and checks; exit 0 iff they pass (2 for an unknown demo).
int demo_command(const std::string& name, std::ostream& out);

}  // namespace dcforge::cli
