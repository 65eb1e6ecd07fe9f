#include <cstdio>
#include <filesystem>
#include <iostream>
#include <set>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "epiconvex/cli/checks.hpp"
#include "epiconvex/cli/config.hpp"
#include "epiconvex/cli/report.hpp"
#include "epiconvex/cli/suite.hpp"
#include "epiconvex/parallel.hpp"

namespace fs = std::filesystem;
using namespace epiconvex::cli;

namespace {

void print_result(const CheckResult& r) {
  std::printf("%-4s %-24s %s (%.1f s)\n", r.pass ? "PASS" : "FAIL", (r.id + " " + r.name).c_str(),
              r.failures.empty() ? "" : r.failures.front().c_str(), r.seconds);
  std::fflush(stdout);
}

int cmd_run(const std::string& config_path, const std::string& out_override) {
  ExperimentConfig cfg;
  try {
    cfg = load_config(config_path);
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 2;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  RunReport rep;
  rep.kind = "run";
  rep.name = cfg.name;
  rep.seed = cfg.seed;
  rep.config = cfg.source;
  for (std::size_t i = 0; i < cfg.checks.size(); ++i) {
    rep.results.push_back(run_check(cfg, cfg.checks[i], i));
    print_result(rep.results.back());
  }
  if (cfg.suite == "paper") {
    SuiteOptions opt;
    opt.on_result = print_result;
    for (auto& r : run_paper_suite(opt).results) rep.results.push_back(std::move(r));
  }
  fs::path out = out_override.empty() ? fs::path(cfg.output_dir) : fs::path(out_override);
  if (out.is_relative() && out_override.empty()) out = fs::path(cfg.base_dir) / out;
  const std::string path = (out / "report.json").string();
  write_report(rep, path);
  emit_curves(rep, (out / "curves").string());
  std::printf("%s: %zu checks, %s -> %s\n", cfg.name.c_str(), rep.results.size(), rep.pass() ? "pass" : "FAIL",
              path.c_str());
  return rep.pass() ? 0 : 1;
}

int cmd_curves(const std::string& report_path, const std::string& out_dir) {
  try {
    const RunReport rep = RunReport::from_json(Json::parse(read_file(report_path)));
    for (const auto& p : emit_curves(rep, out_dir)) std::printf("%s\n", p.c_str());
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 0;
}

int cmd_suite(const std::string& which, const std::string& out, const std::string& data,
              const std::vector<int>& only) {
  if (which != "paper") {
    std::fprintf(stderr, "unknown suite '%s' (expected: paper)\n", which.c_str());
    return 2;
  }
  SuiteOptions opt;
  opt.data_dir = data;
  opt.only = std::set<int>(only.begin(), only.end());
  opt.on_result = print_result;
  const RunReport rep = run_paper_suite(opt);
  if (!out.empty()) write_report(rep, out);
  std::printf("suite paper: %s\n", rep.pass() ? "pass" : "FAIL");
  return rep.pass() ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Transport-inequality numerics runner"};
  app.require_subcommand(1);
  app.footer("Worker threads: EPICONVEX_THREADS (default: hardware concurrency).");

  std::string config_path, run_out;
  auto* run = app.add_subcommand("run", "Execute the checks declared in a config file");
  run->add_option("config", config_path, "Config file (JSON)")->required()->check(CLI::ExistingFile);
  run->add_option("--out", run_out, "Output directory (overrides output.dir)");

  std::string report_path, curves_out;
  auto* curves = app.add_subcommand("curves", "Write one CSV per curve stored in a report");
  curves->add_option("report", report_path, "report.json")->required()->check(CLI::ExistingFile);
  curves->add_option("--out", curves_out, "Destination directory")->required();

  std::string suite_name, suite_out, suite_data;
  std::vector<int> only;
  auto* suite = app.add_subcommand("suite", "Run the built-in acceptance matrix");
  suite->add_option("name", suite_name, "Suite name (paper)")->required();
  suite->add_option("--out", suite_out, "Write the report here");
  suite->add_option("--data", suite_data, "Data directory (default: EPICONVEX_DATA_DIR or the source tree)");
  suite->add_option("--only", only, "Criterion numbers to run")->check(CLI::Range(1, kSuiteCriteria));

  CLI11_PARSE(app, argc, argv);
  std::fprintf(stderr, "threads: %zu\n", epiconvex::thread_count());

  if (*run) return cmd_run(config_path, run_out);
  if (*curves) return cmd_curves(report_path, curves_out);
  return cmd_suite(suite_name, suite_out, suite_data, only);
}
