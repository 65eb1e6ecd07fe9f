#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

namespace epiconvex::cli {

using Json = nlohmann::ordered_json;

/// A table destined for one CSV file.
struct Curve {
  std::string name;
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

/// One executed check or acceptance criterion. `metrics` keeps insertion order.
struct CheckResult {
  std::string id;
  std::string name;
  bool pass = false;
  std::vector<std::pair<std::string, double>> metrics;
  std::vector<std::string> notes;
  std::vector<Curve> curves;
  Json data = Json::object();  // check-specific payload (params, constants, ...)
  double seconds = 0.0;        // wall time, kept out of the report body

  void metric(const std::string& key, double v) { metrics.emplace_back(key, v); }
  void note(std::string s) { notes.push_back(std::move(s)); }
  /// Records `value <= bound` (or the reverse for lower bounds) and folds it into pass.
  bool expect_le(const std::string& key, double value, double bound);
  bool expect_ge(const std::string& key, double value, double bound);
  bool expect(const std::string& key, bool ok);

  std::vector<std::string> failures;
};

struct RunReport {
  std::string kind;  // "run" or "suite"
  std::string name;
  std::uint64_t seed = 0;
  Json config = Json::object();
  std::vector<CheckResult> results;

  bool pass() const;
  /// Deterministic body: no timings, no host information.
  Json to_json() const;
  Json timings_json() const;
  static RunReport from_json(const Json& j);
};

/// Writes to a sibling temporary file and renames it over `path`.
void write_atomic(const std::string& path, const std::string& contents);
std::string read_file(const std::string& path);

/// report.json plus report.timings.json next to it.
void write_report(const RunReport& r, const std::string& path);

/// One CSV per curve in `dir`, named <check id>_<curve name>.csv. Returns the paths.
std::vector<std::string> emit_curves(const RunReport& r, const std::string& dir);
std::string curve_csv(const Curve& c);

/// Shortest round-trip decimal form ("inf" for infinities).
std::string fmt_num(double v);

}  // namespace epiconvex::cli
