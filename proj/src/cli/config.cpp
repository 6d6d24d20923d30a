#include "dcforge/cli/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

#include <fmt/format.h>

#include "dcforge/errors.hpp"

namespace dcforge::cli {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& key, const std::string& v) {
  double out = 0.0;
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError(fmt::format("{}: '{}' is not a number", key, v));
  return out;
}

long long parse_int(const std::string& key, const std::string& v) {
  long long out = 0;
  const char* end = v.data() + v.size();
  const auto [ptr, ec] = std::from_chars(v.data(), end, out);
  if (ec != std::errc() || ptr != end) throw ConfigError(fmt::format("{}: '{}' is not an integer", key, v));
  return out;
}

bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw ConfigError(fmt::format("{}: '{}' is not a boolean", key, v));
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  std::istringstream in(s);
  while (std::getline(in, cur, sep)) out.push_back(trim(cur));
  return out;
}

void apply(RunConfig& cfg, const std::string& key, const std::string& v) {
  if (key == "instance") {
    cfg.instance = v;
  } else if (key == "algorithm") {
    cfg.algorithm = parse_algorithm(v);
  } else if (key == "max_iters") {
    cfg.solve.max_outer_iters = static_cast<int>(parse_int(key, v));
  } else if (key == "gap_tol") {
    cfg.solve.gap_tol = parse_double(key, v);
  } else if (key == "eps_inner") {
    cfg.solve.eps_inner = parse_double(key, v);
  } else if (key == "inner_max_iters") {
    cfg.solve.inner_max_iters = static_cast<int>(parse_int(key, v));
  } else if (key == "step_rule") {
    try {
      cfg.solve.step_rule = parse_step_rule(v);
    } catch (const std::invalid_argument& e) {
      throw ConfigError(e.what());
    }
  } else if (key == "barrier_mu0") {
    cfg.solve.barrier_mu0 = parse_double(key, v);
  } else if (key == "barrier_shrink") {
    cfg.solve.barrier_shrink = parse_double(key, v);
  } else if (key == "unbounded_norm_threshold") {
    cfg.solve.unbounded_norm_threshold = parse_double(key, v);
  } else if (key == "record_wall_time") {
    cfg.solve.record_wall_time = parse_bool(key, v);
  } else if (key == "certificates") {
    cfg.certificates.clear();
    for (const auto& name : split(v, ',')) {
      if (name.empty()) continue;
      try {
        cfg.certificates.push_back(parse_certificate_kind(name));
      } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
      }
    }
  } else if (key == "output_dir") {
    cfg.output_dir = v;
  } else if (key == "seed") {
    const long long s = parse_int(key, v);
    if (s < 0) throw ConfigError("seed must be non-negative");
    cfg.seed = static_cast<std::uint64_t>(s);
  } else if (key == "kkt_tol") {
    cfg.kkt_tol = parse_double(key, v);
  } else if (key == "stationarity_tol") {
    cfg.stationarity_tol = parse_double(key, v);
  } else if (key == "inline_a") {
    cfg.inline_quadratic.a = v;
  } else if (key == "inline_b") {
    cfg.inline_quadratic.b = v;
  } else if (key == "inline_c") {
    cfg.inline_quadratic.c = v;
  } else if (key == "inline_d") {
    cfg.inline_quadratic.d = v;
  } else if (key == "inline_x0") {
    cfg.inline_quadratic.x0 = v;
  } else if (key == "inline_lower") {
    cfg.inline_quadratic.lower = v;
  } else if (key == "inline_upper") {
    cfg.inline_quadratic.upper = v;
  } else {
    throw ConfigError(fmt::format("unknown key '{}'", key));
  }
}

}  // namespace

const char* to_string(Algorithm a) {
  switch (a) {
    case Algorithm::fw:
      return "fw";
    case Algorithm::fw_plus:
      return "fw_plus";
    case Algorithm::cccp:
      return "cccp";
    case Algorithm::cccp_plus:
      return "cccp_plus";
  }
  return "?";
}

Algorithm parse_algorithm(const std::string& name) {
  for (Algorithm a : {Algorithm::fw, Algorithm::fw_plus, Algorithm::cccp, Algorithm::cccp_plus}) {
    if (name == to_string(a)) return a;
  }
  throw ConfigError(fmt::format("unknown algorithm '{}' (expected fw, fw_plus, cccp or cccp_plus)", name));
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::map<std::string, int> seen;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(fmt::format("line {}: expected key = value", lineno));
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty()) throw ConfigError(fmt::format("line {}: empty key", lineno));
    if (const auto it = seen.find(key); it != seen.end()) {
      throw ConfigError(fmt::format("line {}: key '{}' already set on line {}", lineno, key, it->second));
    }
    seen[key] = lineno;
    try {
      apply(cfg, key, value);
    } catch (const ConfigError& e) {
      throw ConfigError(fmt::format("line {}: {}", lineno, e.what()));
    }
  }
  try {
    cfg.solve.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError(fmt::format("cannot read config '{}'", path));
  std::ostringstream ss;
  ss << in.rdbuf();
  try {
    return parse_config(ss.str());
  } catch (const ConfigError& e) {
    throw ConfigError(fmt::format("{}: {}", path, e.what()));
  }
}

Matrix parse_matrix(const std::string& text) {
  std::vector<std::vector<double>> rows;
  for (const auto& row : split(text, ';')) {
    std::vector<double> vals;
    std::string tok;
    std::string cleaned = row;
    std::replace(cleaned.begin(), cleaned.end(), ',', ' ');
    std::istringstream in(cleaned);
    while (in >> tok) vals.push_back(parse_double("matrix entry", tok));
    if (!vals.empty()) rows.push_back(std::move(vals));
  }
  if (rows.empty()) throw ConfigError("empty matrix");
  const std::size_t cols = rows.front().size();
  Matrix m(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(cols));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (rows[i].size() != cols) throw ConfigError("matrix rows have different lengths");
    for (std::size_t j = 0; j < cols; ++j) m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = rows[i][j];
  }
  return m;
}

Vector parse_vector(const std::string& text) {
  const Matrix m = parse_matrix(text);
  if (m.rows() != 1) throw ConfigError("expected a single row vector");
  return m.row(0).transpose();
}

std::string instance_name(const RunConfig& config) {
  const std::string& n = config.instance;
  if (n == "quadratic_dc" || n == "box_quadratic_dc" || n == "dc_constrained") {
    return fmt::format("{}:{}", n, config.seed);
  }
  return n;
}

BenchmarkInstance resolve_instance(const RunConfig& config) {
  const std::string name = instance_name(config);
  try {
    if (name == "inline:quadratic") {
      const InlineQuadratic& q = config.inline_quadratic;
      if (q.a.empty() || q.b.empty()) throw ConfigError("inline:quadratic needs inline_a and inline_b");
      const Matrix a = parse_matrix(q.a);
      const Vector b = parse_vector(q.b);
      const auto n = b.size();
      const Matrix c = q.c.empty() ? Matrix(Matrix::Zero(n, n)) : parse_matrix(q.c);
      const Vector d = q.d.empty() ? Vector(Vector::Zero(n)) : parse_vector(q.d);
      Domain domain = Domain::whole_space(static_cast<int>(n));
      if (!q.lower.empty() || !q.upper.empty()) {
        if (q.lower.empty() || q.upper.empty()) throw ConfigError("inline box needs inline_lower and inline_upper");
        domain = Domain::box(parse_vector(q.lower), parse_vector(q.upper));
      }
      std::optional<Vector> x0;
      if (!q.x0.empty()) x0 = parse_vector(q.x0);
      BenchmarkInstance inst = make_quadratic_dc(a, b, c, d, domain, x0);
      inst.name = name;
      inst.problem.name = name;
      return inst;
    }
    return make_instance(name);
  } catch (const ConfigError&) {
    throw;
  } catch (const std::exception& e) {
    throw ConfigError(fmt::format("instance '{}': {}", name, e.what()));
  }
}

void check_compatibility(const RunConfig& config, const BenchmarkInstance& instance) {
  const bool constrained = !instance.problem.constraints.empty();
  const char* algo = to_string(config.algorithm);
  switch (config.algorithm) {
    case Algorithm::cccp:
    case Algorithm::fw:
      if (constrained) {
        throw ConfigError(fmt::format("algorithm {} needs an instance without DC constraints; '{}' has {} (use {}_plus)",
                                      algo, instance.name, instance.problem.constraints.size(), algo));
      }
      break;
    case Algorithm::cccp_plus:
    case Algorithm::fw_plus:
      if (!constrained) {
        throw ConfigError(fmt::format("algorithm {} needs DC constraints; '{}' has none", algo, instance.name));
      }
      break;
  }
  if (config.solve.step_rule.kind != StepKind::unit && config.algorithm != Algorithm::fw) {
    throw ConfigError(fmt::format("step_rule applies to fw only, not {}", algo));
  }
}

}  // namespace dcforge::cli
