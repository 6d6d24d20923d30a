#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "dcforge/analysis.hpp"
#include "dcforge/problems.hpp"
#include "dcforge/solvers.hpp"

namespace dcforge::cli {

enum ExitCode : int { exit_ok = 0, exit_certificate_failure = 1, exit_config_error = 2, exit_solver_error = 3 };

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

enum class Algorithm { fw, fw_plus, cccp, cccp_plus };

const char* to_string(Algorithm a);
Algorithm parse_algorithm(const std::string& name);

/// Matrices and vectors of an `inline:quadratic` instance: f = 0.5 x'Ax + b'x, g = 0.5 x'Cx + d'x.
struct InlineQuadratic {
  std::string a, b, c, d, x0, lower, upper;
};

/// One experiment. Parsed from `key = value` lines; `#` starts a comment.
///
/// Keys: instance, algorithm, max_iters, gap_tol, eps_inner, inner_max_iters, step_rule,
/// barrier_mu0, barrier_shrink, unbounded_norm_threshold, record_wall_time, certificates
/// (comma separated), output_dir, seed, kkt_tol, stationarity_tol, and inline_a, inline_b,
/// inline_c, inline_d, inline_x0, inline_lower, inline_upper for `instance = inline:quadratic`.
struct RunConfig {
  std::string instance = "quartic1d";
  Algorithm algorithm = Algorithm::cccp;
  SolveConfig solve;
  std::vector<CertificateKind> certificates;
  std::string output_dir = "dcforge_out";
  std::uint64_t seed = 1;
  double kkt_tol = 1e-8;
  double stationarity_tol = 1e-6;
  InlineQuadratic inline_quadratic;
};

/// Throws ConfigError with the offending line number.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);

/// Seeded families named without a seed (`quadratic_dc`) take the config seed.
std::string instance_name(const RunConfig& config);

/// Builds the instance; throws ConfigError for unknown names or malformed inline data.
BenchmarkInstance resolve_instance(const RunConfig& config);

/// Checks that the algorithm fits the instance structure; throws ConfigError.
void check_compatibility(const RunConfig& config, const BenchmarkInstance& instance);

/// "1 2; 3 4" -> 2x2 matrix. Entries separated by spaces or commas, rows by ';'.
Matrix parse_matrix(const std::string& text);
Vector parse_vector(const std::string& text);

}  // namespace dcforge::cli
