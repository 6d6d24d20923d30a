#pragma once

#include <optional>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcforge/solvers.hpp"

namespace dcforge::cli {

class TraceFileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr const char* kTraceHeader =
    "k,objective,fw_gap,dc_gap,step_size,inner_iters,kkt_residual,feas_max,wall_ms";

/// One parsed trace.csv row; empty fields become nullopt.
struct TraceRow {
  int k = 0;
  double objective = 0.0;
  std::optional<double> fw_gap;
  std::optional<double> dc_gap;
  double step_size = 0.0;
  int inner_iters = 0;
  std::optional<double> kkt_residual;
  std::optional<double> feas_max;
  std::optional<double> wall_ms;

  /// fw_gap when present, otherwise dc_gap.
  std::optional<double> gap() const { return fw_gap ? fw_gap : dc_gap; }
};

/// 17 significant digits, so values round-trip exactly.
std::string format_number(double v);

void write_trace_csv(const IterateTrace& trace, std::ostream& out);
void write_trace_csv(const IterateTrace& trace, const std::string& path);

/// Throws TraceFileError on a missing file, a wrong header, a malformed row or no rows.
std::vector<TraceRow> read_trace_csv(const std::string& path);

}  // namespace dcforge::cli
