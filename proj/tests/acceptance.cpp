// Runs the ten acceptance criteria and prints one PASS/FAIL line for each.
// Exit status is the number of failed criteria.

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <iterator>
#include <limits>
#include <string>
#include <vector>

#include <fmt/format.h>
#include <spdlog/spdlog.h>

#include "dcforge/cli/battery.hpp"
#include "dcforge/cli/commands.hpp"
#include "dcforge/cli/config.hpp"

namespace fs = std::filesystem;
using namespace dcforge;
using namespace dcforge::cli;

namespace {

struct Outcome {
  bool passed = false;
  std::string summary;
};

Outcome summarize(const std::vector<CheckResult>& checks, double seconds = 0.0, double limit = 0.0) {
  int failed = 0;
  std::string first_failure;
  double worst = std::numeric_limits<double>::infinity();
  for (const auto& c : checks) {
    worst = std::min(worst, c.margin);
    if (!c.passed) {
      ++failed;
      if (first_failure.empty()) first_failure = fmt::format("; first failure: {} [{}]", c.name, c.details);
    }
  }
  bool ok = !checks.empty() && failed == 0;
  std::string s = fmt::format("{} checks, {} failed, worst margin {:.3e}", checks.size(), failed, worst);
  if (limit > 0.0) {
    ok = ok && seconds < limit;
    s += fmt::format(", {:.2f} s (limit {:.0f} s)", seconds, limit);
  }
  return {ok, s + first_failure};
}

Outcome timed(const std::function<std::vector<CheckResult>()>& body, double limit) {
  const auto t0 = std::chrono::steady_clock::now();
  const auto checks = body();
  const double s = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  return summarize(checks, s, limit);
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "dcforge_acceptance_determinism";
  fs::remove_all(root);
  std::vector<std::string> configs = {"instance = quadratic_dc\nalgorithm = cccp\nmax_iters = 200\n",
                                      "instance = ring2d:v2\nalgorithm = fw_plus\nmax_iters = 100\n"};
  int compared = 0;
  for (std::size_t c = 0; c < configs.size(); ++c) {
    std::string first;
    for (int rep = 0; rep < 2; ++rep) {
      RunConfig cfg = parse_config(configs[c]);
      cfg.seed = 7;
      cfg.output_dir = (root / fmt::format("cfg{}_run{}", c, rep)).string();
      const RunResult res = run(cfg);
      if (res.exit_code != exit_ok) return {false, fmt::format("config {} run {}: {}", c, rep, res.message)};
      const std::string bytes = slurp(fs::path(cfg.output_dir) / "trace.csv");
      if (bytes.empty()) return {false, fmt::format("config {} run {}: empty trace.csv", c, rep)};
      if (rep == 0) {
        first = bytes;
      } else if (bytes != first) {
        return {false, fmt::format("config {}: trace.csv differs between runs", c)};
      }
    }
    ++compared;
  }
  fs::remove_all(root);
  return {true, fmt::format("{} configs, trace.csv byte-identical across two runs", compared)};
}

}  // namespace

int main() {
  spdlog::set_level(spdlog::level::err);
  struct Criterion {
    const char* id;
    const char* title;
    std::function<Outcome()> body;
  };
  const std::vector<Criterion> criteria = {
      {"AC1", "CCCP and FW on the lift agree (unconstrained)",
       [] { return timed([] { return equivalence_unconstrained(50, 1e-8); }, 5.0); }},
      {"AC2", "CCCP+ and FW+ on the lift agree (DC constraints)",
       [] { return timed([] { return equivalence_constrained(30, 1e-6, 1e-6); }, 10.0); }},
      {"AC3", "CCCP min-gap rate", [] { return summarize(cccp_rate_checks(1000)); }},
      {"AC4", "concave FW+ and CCCP+ min-gap rate with feasibility",
       [] {
         auto checks = fw_plus_concave_rate_checks(500, 1e-6);
         const auto more = cccp_plus_rate_checks(500);
         checks.insert(checks.end(), more.begin(), more.end());
         return summarize(checks);
       }},
      {"AC5", "convex-mode FW+ objective and constraint bounds", [] { return summarize(fw_plus_convex_rate_checks(1000)); }},
      {"AC6", "KKT identity and complementary slackness", [] { return summarize(kkt_checks(50, 1e-8)); }},
      {"AC7", "reduction demos", [] { return summarize(connections_checks()); }},
      {"AC8", "curvature properties", [] { return summarize(curvature_checks(1e-9)); }},
      {"AC9", "stationarity at grid-oracle points", [] { return summarize(stationarity_checks(2e-3, 50, 1e-4, 1.0, 0.1)); }},
      {"AC10", "determinism of run", determinism},
  };

  int failed = 0;
  for (const auto& c : criteria) {
    Outcome o;
    try {
      o = c.body();
    } catch (const std::exception& e) {
      o = {false, std::string("error: ") + e.what()};
    }
    if (!o.passed) ++failed;
    std::cout << fmt::format("{:<5} {}  {}: {}", c.id, o.passed ? "PASS" : "FAIL", c.title, o.summary) << std::endl;
  }
  std::cout << fmt::format("{} of {} criteria passed", criteria.size() - failed, criteria.size()) << std::endl;
  return failed;
}
