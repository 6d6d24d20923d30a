#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>

#include <spdlog/spdlog.h>

#include "dcforge/cli/battery.hpp"
#include "dcforge/cli/commands.hpp"
#include "dcforge/cli/config.hpp"
#include "dcforge/cli/trace_io.hpp"

using namespace dcforge;
using namespace dcforge::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / "dcforge_cli_tests" / name;
  fs::remove_all(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

struct Quiet {
  Quiet() { spdlog::set_level(spdlog::level::err); }
} quiet;

}  // namespace

TEST_CASE("config parsing") {
  const RunConfig cfg = parse_config(
      "# comment\n"
      "instance = ring2d:v2\n"
      "algorithm = cccp_plus\n"
      "max_iters = 25\n"
      "gap_tol = 1e-9\n"
      "certificates = corollary6_rate, stationarity\n"
      "seed = 9\n");
  CHECK(cfg.instance == "ring2d:v2");
  CHECK(cfg.algorithm == Algorithm::cccp_plus);
  CHECK(cfg.solve.max_outer_iters == 25);
  CHECK(cfg.solve.gap_tol == 1e-9);
  REQUIRE(cfg.certificates.size() == 2);
  CHECK(cfg.certificates[1] == CertificateKind::stationarity);
  CHECK(cfg.seed == 9u);
}

TEST_CASE("config errors name the line") {
  auto message = [](const std::string& text) {
    try {
      parse_config(text);
    } catch (const ConfigError& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  CHECK(message("instance = quartic1d\nbogus = 1\n").find("line 2") != std::string::npos);
  CHECK(message("max_iters = 10\nmax_iters = 20\n").find("line 2") != std::string::npos);
  CHECK(message("max_iters = ten\n").find("line 1") != std::string::npos);
  CHECK(message("algorithm = newton\n").find("line 1") != std::string::npos);
  CHECK(message("no equals sign\n").find("line 1") != std::string::npos);
  CHECK_THROWS_AS(load_config("/nonexistent/dcforge.cfg"), ConfigError);
}

TEST_CASE("seeded families take the config seed") {
  RunConfig cfg = parse_config("instance = quadratic_dc\nseed = 4\n");
  CHECK(instance_name(cfg) == "quadratic_dc:4");
  cfg = parse_config("instance = quadratic_dc:2\nseed = 4\n");
  CHECK(instance_name(cfg) == "quadratic_dc:2");
}

TEST_CASE("inline quadratic instance") {
  RunConfig cfg = parse_config(
      "instance = inline:quadratic\n"
      "inline_a = 4 0; 0 3\n"
      "inline_b = 0 0\n"
      "inline_c = 2 0; 0 2\n"
      "inline_d = -2 0\n");
  cfg.output_dir = scratch("inline").string();
  const RunResult res = run(cfg);
  REQUIRE(res.exit_code == exit_ok);
  CHECK(res.trace.final_iterate[0] == doctest::Approx(-1.0).epsilon(1e-9));
}

TEST_CASE("incompatible algorithm is a config error") {
  RunConfig cfg = parse_config("instance = quartic1d\nalgorithm = cccp_plus\n");
  cfg.output_dir = scratch("incompatible").string();
  CHECK(run(cfg).exit_code == exit_config_error);
  cfg = parse_config("instance = ring2d:v1\nalgorithm = cccp\n");
  CHECK(run(cfg).exit_code == exit_config_error);
  cfg = parse_config("instance = quartic1d\nalgorithm = cccp\nstep_rule = harmonic\n");
  CHECK(run(cfg).exit_code == exit_config_error);
  CHECK_FALSE(fs::exists(scratch("incompatible") / "trace.csv"));
}

TEST_CASE("shipped config runs with all certificates passing") {
  RunConfig cfg = load_config(DCFORGE_SOURCE_DIR "/configs/quartic1d_cccp.cfg");
  cfg.output_dir = scratch("shipped").string();
  const RunResult res = run(cfg);
  CHECK(res.exit_code == exit_ok);
  const auto rows = read_trace_csv((fs::path(cfg.output_dir) / "trace.csv").string());
  CHECK(rows.size() == 100u);
  CHECK(rows.front().k == 1);
  CHECK(rows.front().dc_gap);
  CHECK_FALSE(rows.front().fw_gap);
}

TEST_CASE("failing certificate gives exit 1") {
  RunConfig cfg = parse_config("instance = quartic1d\nmax_iters = 2\ncertificates = stationarity\n");
  cfg.output_dir = scratch("cert_fail").string();
  CHECK(run(cfg).exit_code == exit_certificate_failure);
}

TEST_CASE("runs are byte-identical") {
  for (const char* algo : {"cccp", "fw"}) {
    CAPTURE(algo);
    std::string first;
    for (int rep = 0; rep < 2; ++rep) {
      RunConfig cfg = parse_config(std::string("instance = quadratic_dc\nmax_iters = 40\nalgorithm = ") + algo + "\n");
      cfg.seed = 3;
      cfg.output_dir = scratch(std::string(algo) + std::to_string(rep)).string();
      REQUIRE(run(cfg).exit_code == exit_ok);
      const std::string bytes = slurp(fs::path(cfg.output_dir) / "trace.csv");
      if (rep == 0) first = bytes;
      else CHECK(bytes == first);
    }
  }
}

TEST_CASE("trace csv round-trips") {
  SolveConfig sc;
  sc.max_outer_iters = 10;
  const IterateTrace t = fw_plus_solve(make_convex_box_instance().phi, make_convex_box_instance().region,
                                       make_convex_box_instance().psis, make_convex_box_instance().w1, sc);
  const fs::path dir = scratch("roundtrip");
  fs::create_directories(dir);
  write_trace_csv(t, (dir / "trace.csv").string());
  const auto rows = read_trace_csv((dir / "trace.csv").string());
  REQUIRE(rows.size() == t.records.size());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows[i].objective == t.records[i].objective);
    CHECK(rows[i].fw_gap == t.records[i].fw_gap);
    CHECK(rows[i].step_size == t.records[i].step);
    CHECK(rows[i].feas_max == t.records[i].feas_max);
    CHECK_FALSE(rows[i].wall_ms);
  }
  std::ofstream(dir / "bad.csv") << "k,objective\n1,2\n";
  CHECK_THROWS_AS(read_trace_csv((dir / "bad.csv").string()), TraceFileError);
  std::ofstream(dir / "empty.csv") << kTraceHeader << "\n";
  CHECK_THROWS_AS(read_trace_csv((dir / "empty.csv").string()), TraceFileError);
}

TEST_CASE("report writes the summary and the bound table") {
  RunConfig cfg = parse_config("instance = quartic1d\nmax_iters = 20\n");
  cfg.output_dir = scratch("report").string();
  REQUIRE(run(cfg).exit_code == exit_ok);
  std::ostringstream out;
  CHECK(report_command(cfg.output_dir, out) == exit_ok);
  CHECK(out.str().find("bound violations: 0") != std::string::npos);
  std::istringstream dat(slurp(fs::path(cfg.output_dir) / "gap_vs_bound.dat"));
  std::string line;
  std::getline(dat, line);
  CHECK(line == "# k min_gap_so_far bound");
  int k = 0;
  double gap = 0.0, bound = 0.0;
  int rows = 0;
  while (dat >> k >> gap >> bound) {
    CHECK(bound == doctest::Approx(0.25 / k));
    CHECK(gap <= bound);
    ++rows;
  }
  CHECK(rows == 20);
  CHECK(fs::exists(fs::path(cfg.output_dir) / "summary.md"));

  const fs::path empty = scratch("report_empty");
  fs::create_directories(empty);
  std::ofstream(empty / "trace.csv") << kTraceHeader << "\n";
  std::ostringstream err;
  CHECK(report_command(empty.string(), err) == exit_config_error);
  CHECK(report_command(scratch("report_missing").string(), err) == exit_config_error);
}

TEST_CASE("demos pass") {
  for (const auto& name : demo_names()) {
    CAPTURE(name);
    std::ostringstream out;
    CHECK(demo_command(name, out) == exit_ok);
  }
  std::ostringstream out;
  CHECK(demo_command("nope", out) == exit_config_error);
  CHECK(verify_command("nope", out) == exit_config_error);
}

TEST_CASE("overrides replace config values") {
  RunConfig cfg = parse_config("max_iters = 10\nseed = 1\n");
  RunOverrides o;
  o.max_iters = 3;
  o.seed = 8;
  o.output_dir = "x";
  apply_overrides(cfg, o);
  CHECK(cfg.solve.max_outer_iters == 3);
  CHECK(cfg.seed == 8u);
  CHECK(cfg.output_dir == "x");
}
