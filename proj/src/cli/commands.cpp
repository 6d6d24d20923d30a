#include "dcforge/cli/commands.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <fmt/format.h>
#include <spdlog/sinks/stdout_sinks.h>
#include <spdlog/spdlog.h>

#include "dcforge/cli/battery.hpp"
#include "dcforge/cli/trace_io.hpp"
#include "dcforge/errors.hpp"
#include "dcforge/transforms.hpp"

namespace dcforge::cli {

namespace fs = std::filesystem;

void setup_logging() {
  auto logger = spdlog::stderr_logger_st("dcforge");
  logger->set_pattern("[%l] %v");
  spdlog::set_default_logger(logger);
  const char* env = std::getenv("DCFORGE_LOG");
  const std::string level = env ? env : "info";
  if (level == "quiet") {
    spdlog::set_level(spdlog::level::err);
  } else if (level == "trace") {
    spdlog::set_level(spdlog::level::trace);
  } else {
    spdlog::set_level(spdlog::level::info);
    if (level != "info") spdlog::warn("DCFORGE_LOG='{}' is not one of quiet, info, trace; using info", level);
  }
}

void apply_overrides(RunConfig& config, const RunOverrides& o) {
  if (o.max_iters) config.solve.max_outer_iters = *o.max_iters;
  if (o.gap_tol) config.solve.gap_tol = *o.gap_tol;
  if (o.seed) config.seed = *o.seed;
  if (o.output_dir) config.output_dir = *o.output_dir;
}

namespace {

IterateTrace solve(const RunConfig& cfg, const BenchmarkInstance& inst) {
  const DCProblem& p = inst.problem;
  switch (cfg.algorithm) {
    case Algorithm::cccp:
      return cccp_solve(p, cfg.solve);
    case Algorithm::cccp_plus:
      return cccp_plus_solve(p, cfg.solve);
    case Algorithm::fw: {
      const EpigraphLift lift = make_lift(p);
      return fw_solve(lift.phi(), lift.region(), lift.embed(p.x_init), cfg.solve);
    }
    case Algorithm::fw_plus: {
      const EpigraphLift lift = make_lift(p);
      return fw_plus_solve(lift.phi(), lift.region(), lift.psis(), lift.embed(p.x_init), cfg.solve);
    }
  }
  throw std::logic_error("unreachable");
}

Certificate evaluate(CertificateKind kind, const RunConfig& cfg, const BenchmarkInstance& inst,
                     const IterateTrace& trace) {
  switch (kind) {
    case CertificateKind::equivalence:
      return certify_equivalence(inst.problem, cfg.solve, cfg.solve.max_outer_iters);
    case CertificateKind::kkt:
      return certify_kkt(trace, cfg.kkt_tol);
    case CertificateKind::stationarity: {
      const Vector x = trace.final_iterate.head(inst.problem.dim());
      try {
        return check_stationarity(inst.problem, x, cfg.stationarity_tol, cfg.solve);
      } catch (const InfeasiblePoint& e) {
        return Certificate{kind, false, -std::numeric_limits<double>::infinity(), e.what(), true};
      }
    }
    default: {
      RateContext ctx;
      ctx.oracle_relative = inst.provenance == Provenance::grid_oracle;
      return certify_rates(trace, inst.known_optimum, kind, ctx);
    }
  }
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw TraceFileError(fmt::format("cannot write '{}'", path.string()));
  out << text;
}

}  // namespace

RunResult run(const RunConfig& cfg) {
  RunResult res;
  std::optional<BenchmarkInstance> inst;
  try {
    cfg.solve.validate();
    inst = resolve_instance(cfg);
    check_compatibility(cfg, *inst);
    inst->problem.validate();
  } catch (const std::exception& e) {
    res.exit_code = exit_config_error;
    res.message = fmt::format("config error: {}", e.what());
    return res;
  }

  spdlog::info("solving {} with {} ({} iterations)", inst->name, to_string(cfg.algorithm), cfg.solve.max_outer_iters);
  try {
    res.trace = solve(cfg, *inst);
    for (CertificateKind kind : cfg.certificates) {
      res.certificates.push_back(evaluate(kind, cfg, *inst, res.trace));
      const Certificate& c = res.certificates.back();
      spdlog::debug("certificate {}: {} (margin {:.3e}) {}", to_string(kind), c.passed ? "pass" : "FAIL", c.worst_margin,
                   c.details);
    }
  } catch (const std::exception& e) {
    res.exit_code = exit_solver_error;
    res.message = fmt::format("solver error: {}", e.what());
    return res;
  }

  try {
    const fs::path dir(cfg.output_dir);
    fs::create_directories(dir);
    write_trace_csv(res.trace, (dir / "trace.csv").string());

    std::string certs;
    for (const auto& c : res.certificates) {
      certs += fmt::format("{},{},{}\n", to_string(c.kind), c.passed ? "true" : "false", format_number(c.worst_margin));
    }
    write_text(dir / "certificates.txt", certs);

    std::string meta;
    meta += fmt::format("instance={}\n", inst->name);
    meta += fmt::format("algorithm={}\n", to_string(cfg.algorithm));
    meta += fmt::format("seed={}\n", cfg.seed);
    meta += fmt::format("rows={}\n", res.trace.records.size());
    meta += fmt::format("status={}\n", res.trace.status == TraceStatus::gap_tol ? "gap_tol" : "max_iters");
    if (inst->known_optimum) meta += fmt::format("f_star={}\n", format_number(inst->known_optimum->f_star));
    meta += fmt::format("optimum_provenance={}\n",
                        inst->provenance == Provenance::grid_oracle ? "grid_oracle" : "analytic");
    write_text(dir / "run_meta.txt", meta);
  } catch (const std::exception& e) {
    res.exit_code = exit_config_error;
    res.message = fmt::format("output error: {}", e.what());
    return res;
  }

  const bool all_pass =
      std::all_of(res.certificates.begin(), res.certificates.end(), [](const Certificate& c) { return c.passed; });
  res.exit_code = all_pass ? exit_ok : exit_certificate_failure;
  res.message = fmt::format("{} rows written to {}; {} certificate(s) {}", res.trace.records.size(), cfg.output_dir,
                            res.certificates.size(), all_pass ? "passed" : "with failures");
  return res;
}

int run_command(const std::string& config_path, const RunOverrides& overrides, std::ostream& out) {
  RunConfig cfg;
  try {
    cfg = load_config(config_path);
    apply_overrides(cfg, overrides);
  } catch (const std::exception& e) {
    out << "config error: " << e.what() << '\n';
    return exit_config_error;
  }
  const RunResult res = run(cfg);
  out << res.message << '\n';
  for (const auto& c : res.certificates) {
    out << fmt::format("  {:<20} {:<4} margin {:>11.3e}  {}\n", to_string(c.kind), c.passed ? "PASS" : "FAIL",
                       c.worst_margin, c.details);
  }
  return res.exit_code;
}

int verify_command(const std::string& suite, std::ostream& out) {
  Suite s;
  try {
    s = parse_suite(suite);
  } catch (const std::exception& e) {
    out << e.what() << '\n';
    return exit_config_error;
  }
  const bool ok = print_checks(run_suite(s), out);
  return ok ? exit_ok : exit_certificate_failure;
}

int demo_command(const std::string& name, std::ostream& out) {
  DemoReport rep{};
  try {
    rep = run_demo(name);
  } catch (const std::invalid_argument& e) {
    out << e.what() << '\n';
    return exit_config_error;
  } catch (const std::exception& e) {
    out << "solver error: " << e.what() << '\n';
    return exit_solver_error;
  }
  out << "demo " << rep.name << '\n';
  for (const auto& l : rep.lines) out << l << '\n';
  out << '\n';
  print_checks(rep.checks, out);
  return rep.passed() ? exit_ok : exit_certificate_failure;
}

}  // namespace dcforge::cli
