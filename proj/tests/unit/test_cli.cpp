#include <gtest/gtest.h>

#include <filesystem>

#include "epiconvex/cli/checks.hpp"
#include "epiconvex/cli/config.hpp"
#include "epiconvex/cli/report.hpp"

using namespace epiconvex::cli;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
  const auto p = fs::temp_directory_path() / ("epiconvex_cli_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

}  // namespace

TEST(Config, ParsesFullDocument) {
  const auto cfg = parse_config(R"({
    "name": "demo", "seed": 3,
    "domain": {"kind": "affine_max", "params": [0, 0, 1, -0.5]},
    "norm": {"kind": "p_norm", "p": 3},
    "params": {"n": 2, "p": 1.5, "a": 2.5, "h_list": [0.1, 0.2]},
    "fixture": {"kind": "bump", "center": [0.1, 0.2], "radius": 0.5},
    "quadrature": {"dx": 0.05, "R": 10, "levels": 2},
    "output": {"dir": "o"},
    "checks": ["constants", {"check": "trace_gn", "tolerance": 0.05}]
  })");
  EXPECT_EQ(cfg.name, "demo");
  EXPECT_EQ(cfg.seed, 3u);
  EXPECT_EQ(cfg.domain.kind, "affine_max");
  EXPECT_EQ(cfg.norm.p, 3.0);
  EXPECT_EQ(cfg.params.h_list.size(), 2u);
  EXPECT_EQ(cfg.fixture.radius, 0.5);
  EXPECT_EQ(cfg.quadrature.levels, 2u);
  ASSERT_EQ(cfg.checks.size(), 2u);
  EXPECT_EQ(cfg.checks[0].kind, CheckKind::constants);
  EXPECT_EQ(cfg.checks[1].kind, CheckKind::trace_gn);
  EXPECT_EQ(cfg.checks[1].options["tolerance"], 0.05);
  EXPECT_EQ(cfg.checks[1].line, 9u);
}

TEST(Config, UnknownCheckReportsPosition) {
  const std::string text = "{\n  \"checks\": [\n    \"constants\",\n      \"bbl_gapp\"\n  ]\n}\n";
  try {
    parse_config(text);
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 4u);
    EXPECT_EQ(e.column(), 7u);
    EXPECT_NE(std::string(e.what()).find("bbl_gapp"), std::string::npos);
    EXPECT_NE(std::string(e.what()).find("equivalence_scan"), std::string::npos);
  }
}

TEST(Config, UnknownCheckInObjectForm) {
  try {
    parse_config("{\"checks\": [{\"check\": \"magic\"}]}");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 1u);
    EXPECT_GT(e.column(), 1u);
  }
}

TEST(Config, SyntaxErrorReportsPosition) {
  try {
    parse_config("{\n  \"name\": \"x\",\n  \"seed\": ,\n}\n");
    FAIL();
  } catch (const ConfigError& e) {
    EXPECT_EQ(e.line(), 3u);
  }
}

TEST(Config, RejectsUnknownKeysAndKinds) {
  EXPECT_THROW(parse_config("{\"colour\": 1}"), ConfigError);
  EXPECT_THROW(parse_config("{\"domain\": {\"kind\": \"sphere\"}}"), ConfigError);
  EXPECT_THROW(parse_config("{\"domain\": {\"kind\": \"cone\", \"slope\": 1}}"), ConfigError);
  EXPECT_THROW(parse_config("{\"norm\": {\"kind\": \"sup\"}}"), ConfigError);
  EXPECT_THROW(parse_config("{\"fixture\": {\"kind\": \"grid\"}}"), ConfigError);
  EXPECT_THROW(parse_config("{\"quadrature\": {\"levels\": 0}}"), ConfigError);
  EXPECT_THROW(parse_config("{\"suite\": \"other\"}"), ConfigError);
  EXPECT_THROW(parse_config("{\"params\": {\"n\": \"two\"}}"), ConfigError);
}

TEST(Config, LineColumn) {
  const std::string t = "ab\ncd\n\nef";
  EXPECT_EQ(line_column(t, 0), std::make_pair(std::size_t{1}, std::size_t{1}));
  EXPECT_EQ(line_column(t, 4), std::make_pair(std::size_t{2}, std::size_t{2}));
  EXPECT_EQ(line_column(t, 8), std::make_pair(std::size_t{4}, std::size_t{2}));
}

TEST(Config, EveryCheckNameRoundTrips) {
  for (const auto& s : check_names()) EXPECT_EQ(to_string(check_kind_from_string(s)), s);
  EXPECT_EQ(check_names().size(), 10u);
  EXPECT_THROW(check_kind_from_string("nope"), std::invalid_argument);
}

TEST(Run, InvalidExponentsBecomeValidationErrors) {
  const auto cfg = parse_config(R"({"params": {"n": 2, "p": 3, "a": 2}, "checks": ["constants", "trace_gn"]})");
  const auto rep = run_config(cfg);
  ASSERT_EQ(rep.results.size(), 2u);
  for (const auto& r : rep.results) {
    EXPECT_FALSE(r.pass);
    ASSERT_FALSE(r.failures.empty());
    EXPECT_NE(r.failures[0].find("n > p > 1"), std::string::npos);
  }
  EXPECT_FALSE(rep.pass());
  const auto low = run_config(parse_config(R"({"params": {"n": 3, "p": 1.5, "a": 2}, "checks": ["constants"]})"));
  EXPECT_NE(low.results[0].failures[0].find("a >= n"), std::string::npos);
}

TEST(Run, EmptyCheckListPasses) {
  const auto rep = run_config(parse_config(R"({"checks": []})"));
  EXPECT_TRUE(rep.results.empty());
  EXPECT_TRUE(rep.pass());
}

TEST(Run, FailureDoesNotAbortLaterChecks) {
  const auto rep = run_config(parse_config(R"({
    "params": {"n": 2, "p": 1.5, "a": 2},
    "domain": {"kind": "paraboloid", "params": [1]},
    "quadrature": {"dx": 0.2, "R": 4},
    "checks": ["trace_gn", "constants"]
  })"));
  ASSERT_EQ(rep.results.size(), 2u);
  EXPECT_FALSE(rep.results[0].pass);
  EXPECT_NE(rep.results[0].failures[0].find("validation error"), std::string::npos);
  EXPECT_TRUE(rep.results[0].data.contains("witness"));
  EXPECT_EQ(rep.results[1].id, "1_constants");
}

TEST(Run, RerunsAreBitIdentical) {
  const auto cfg = parse_config(R"({
    "seed": 5,
    "quadrature": {"dx": 0.2, "R": 4},
    "checks": ["constants", "admissibility", {"check": "semigroup", "half_width": 1.0}]
  })");
  EXPECT_EQ(run_config(cfg).to_json().dump(), run_config(cfg).to_json().dump());
}

TEST(Report, JsonRoundTripAndInfinities) {
  RunReport rep;
  rep.kind = "run";
  rep.name = "x";
  CheckResult r;
  r.id = "0_a";
  r.pass = true;
  r.expect_le("m", 1.0, 2.0);
  r.metric("big", HUGE_VAL);
  r.curves.push_back(Curve{"c", {"h", "phi", "error"}, {{0.0, 1.0, HUGE_VAL}}});
  rep.results.push_back(r);
  const auto j = rep.to_json();
  EXPECT_EQ(j["results"][0]["metrics"]["big"], "inf");
  const auto back = RunReport::from_json(j);
  EXPECT_EQ(back.to_json().dump(), j.dump());
  EXPECT_EQ(back.results[0].curves[0].rows[0][2], HUGE_VAL);
  EXPECT_FALSE(j.dump().find("seconds") != std::string::npos);
}

TEST(Report, ExpectationsFoldIntoPass) {
  CheckResult r;
  r.pass = true;
  EXPECT_TRUE(r.expect_ge("a", 1.0, 0.5));
  EXPECT_TRUE(r.pass);
  EXPECT_FALSE(r.expect_le("b", 2.0, 1.0));
  EXPECT_FALSE(r.pass);
  EXPECT_EQ(r.failures.size(), 1u);
}

TEST(Report, CurvesHaveHeadersAndStableNames) {
  const auto dir = scratch("curves");
  RunReport rep;
  CheckResult r;
  r.id = "2_equivalence_scan";
  r.curves.push_back(Curve{"phi", {"h", "phi", "error"}, {{0.0, 1.0, 0.0}, {0.1, 1.25, 0.001}}});
  r.curves.push_back(Curve{"refinement", {"dx", "abs_ratio_minus_one"}, {{0.1, 0.5}}});
  rep.results.push_back(r);
  const auto paths = emit_curves(rep, dir.string());
  ASSERT_EQ(paths.size(), 2u);
  EXPECT_EQ(fs::path(paths[0]).filename(), "2_equivalence_scan_phi.csv");
  EXPECT_EQ(read_file(paths[0]), "h,phi,error\n0,1,0\n0.1,1.25,0.001\n");
  EXPECT_EQ(read_file(paths[1]), "dx,abs_ratio_minus_one\n0.1,0.5\n");
}

TEST(Report, AtomicWriteLeavesNoTemporary) {
  const auto dir = scratch("atomic");
  RunReport rep;
  rep.name = "t";
  write_report(rep, (dir / "sub" / "report.json").string());
  EXPECT_TRUE(fs::exists(dir / "sub" / "report.json"));
  EXPECT_TRUE(fs::exists(dir / "sub" / "report.timings.json"));
  EXPECT_FALSE(fs::exists(dir / "sub" / "report.json.tmp"));
}

TEST(Report, FmtNumIsShortestRoundTrip) {
  EXPECT_EQ(fmt_num(0.1), "0.1");
  EXPECT_EQ(fmt_num(1.0 / 3.0), "0.3333333333333333");
  EXPECT_EQ(fmt_num(-HUGE_VAL), "-inf");
}
