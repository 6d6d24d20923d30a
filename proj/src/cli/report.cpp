#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <optional>

#include <fmt/format.h>

#include "dcforge/cli/commands.hpp"
#include "dcforge/cli/trace_io.hpp"

namespace dcforge::cli {

namespace fs = std::filesystem;

namespace {

std::map<std::string, std::string> read_meta(const fs::path& path) {
  std::map<std::string, std::string> meta;
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) meta[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return meta;
}

std::optional<double> to_double(const std::string& s) {
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

}  // namespace

int report_command(const std::string& trace_dir, std::ostream& out) {
  const fs::path dir(trace_dir);
  std::vector<TraceRow> rows;
  try {
    rows = read_trace_csv((dir / "trace.csv").string());
    for (const auto& r : rows) {
      if (!r.gap()) throw TraceFileError(fmt::format("row k={} has neither fw_gap nor dc_gap", r.k));
    }
  } catch (const std::exception& e) {
    out << "report error: " << e.what() << '\n';
    return exit_config_error;
  }

  const auto meta = read_meta(dir / "run_meta.txt");
  std::optional<double> f_star;
  if (const auto it = meta.find("f_star"); it != meta.end()) f_star = to_double(it->second);
  const double head = f_star ? rows.front().objective - *f_star : std::numeric_limits<double>::quiet_NaN();

  double running = std::numeric_limits<double>::infinity();
  int best_k = rows.front().k;
  double worst_margin = std::numeric_limits<double>::infinity();
  int worst_k = rows.front().k;
  int violations = 0;
  std::string dat = "# k min_gap_so_far bound\n";
  for (const auto& r : rows) {
    const double g = *r.gap();
    if (g < running) {
      running = g;
      best_k = r.k;
    }
    const double bound = f_star ? head / r.k : std::numeric_limits<double>::quiet_NaN();
    dat += fmt::format("{} {} {}\n", r.k, format_number(running), f_star ? format_number(bound) : "nan");
    if (f_star) {
      const double margin = bound - running;
      if (margin < worst_margin) {
        worst_margin = margin;
        worst_k = r.k;
      }
      if (margin < 0.0) ++violations;
    }
  }

  std::string md = "# Run summary\n\n";
  if (const auto it = meta.find("instance"); it != meta.end()) md += fmt::format("- instance: `{}`\n", it->second);
  if (const auto it = meta.find("algorithm"); it != meta.end()) md += fmt::format("- algorithm: `{}`\n", it->second);
  md += fmt::format("- rows: {}\n", rows.size());
  md += fmt::format("- final objective: {}\n", format_number(rows.back().objective));
  md += fmt::format("- best gap: {} at k = {}\n", format_number(running), best_k);
  if (f_star) {
    md += fmt::format("- optimum: {} (bound (F_1 - F*) / k with F_1 - F* = {})\n", format_number(*f_star),
                      format_number(head));
    md += fmt::format("- worst bound margin: {} at k = {}\n", format_number(worst_margin), worst_k);
    md += fmt::format("- bound violations: {}\n", violations);
  } else {
    md += "- optimum: unknown, bound not evaluated\n";
  }

  try {
    std::ofstream(dir / "gap_vs_bound.dat", std::ios::binary) << dat;
    std::ofstream(dir / "summary.md", std::ios::binary) << md;
  } catch (const std::exception& e) {
    out << "report error: " << e.what() << '\n';
    return exit_config_error;
  }
  out << md;
  return exit_ok;
}

}  // namespace dcforge::cli
