#include "dcforge/cli/trace_io.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include <fmt/format.h>

namespace dcforge::cli {

namespace {

std::string opt(const std::optional<double>& v) { return v ? format_number(*v) : std::string(); }

std::optional<double> parse_field(const std::string& s, int line, const char* column) {
  if (s.empty()) return std::nullopt;
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  if (s == "nan" || s == "-nan") return std::numeric_limits<double>::quiet_NaN();
  double v = 0.0;
  const char* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end) {
    throw TraceFileError(fmt::format("trace.csv line {}: column {} holds '{}'", line, column, s));
  }
  return v;
}

double required(const std::optional<double>& v, int line, const char* column) {
  if (!v) throw TraceFileError(fmt::format("trace.csv line {}: column {} is empty", line, column));
  return *v;
}

}  // namespace

std::string format_number(double v) { return fmt::format("{:.17g}", v); }

void write_trace_csv(const IterateTrace& trace, std::ostream& out) {
  out << kTraceHeader << '\n';
  for (const auto& r : trace.records) {
    out << r.k << ',' << format_number(r.objective) << ',' << opt(r.fw_gap) << ',' << opt(r.dc_gap) << ','
        << format_number(r.step) << ',' << r.inner_iters << ',' << opt(r.kkt_residual) << ',' << opt(r.feas_max) << ','
        << opt(r.wall_ms) << '\n';
  }
}

void write_trace_csv(const IterateTrace& trace, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw TraceFileError(fmt::format("cannot write '{}'", path));
  write_trace_csv(trace, out);
}

std::vector<TraceRow> read_trace_csv(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw TraceFileError(fmt::format("cannot read '{}'", path));
  std::string line;
  if (!std::getline(in, line)) throw TraceFileError(fmt::format("'{}' is empty", path));
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kTraceHeader) throw TraceFileError(fmt::format("'{}' has an unexpected header", path));
  std::vector<TraceRow> rows;
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f;
    std::string cell;
    std::istringstream ss(line);
    while (std::getline(ss, cell, ',')) f.push_back(cell);
    if (!line.empty() && line.back() == ',') f.emplace_back();
    if (f.size() != 9) throw TraceFileError(fmt::format("trace.csv line {}: expected 9 fields, got {}", lineno, f.size()));
    TraceRow r;
    r.k = static_cast<int>(required(parse_field(f[0], lineno, "k"), lineno, "k"));
    r.objective = required(parse_field(f[1], lineno, "objective"), lineno, "objective");
    r.fw_gap = parse_field(f[2], lineno, "fw_gap");
    r.dc_gap = parse_field(f[3], lineno, "dc_gap");
    r.step_size = required(parse_field(f[4], lineno, "step_size"), lineno, "step_size");
    r.inner_iters = static_cast<int>(required(parse_field(f[5], lineno, "inner_iters"), lineno, "inner_iters"));
    r.kkt_residual = parse_field(f[6], lineno, "kkt_residual");
    r.feas_max = parse_field(f[7], lineno, "feas_max");
    r.wall_ms = parse_field(f[8], lineno, "wall_ms");
    rows.push_back(r);
  }
  if (rows.empty()) throw TraceFileError(fmt::format("'{}' has no rows", path));
  return rows;
}

}  // namespace dcforge::cli
