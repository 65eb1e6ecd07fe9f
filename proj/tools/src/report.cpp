#include "epiconvex/cli/report.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

namespace epiconvex::cli {

namespace {

// JSON has no infinities; they travel as strings.
Json num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

double from_num(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return HUGE_VAL;
    if (s == "-inf") return -HUGE_VAL;
    return std::nan("");
  }
  return j.get<double>();
}

}  // namespace

std::string fmt_num(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

bool CheckResult::expect_le(const std::string& key, double value, double bound) {
  metric(key, value);
  metric(key + "_bound", bound);
  const bool ok = value <= bound;
  if (!ok) failures.push_back(key + " = " + fmt_num(value) + " exceeds " + fmt_num(bound));
  pass = pass && ok;
  return ok;
}

bool CheckResult::expect_ge(const std::string& key, double value, double bound) {
  metric(key, value);
  metric(key + "_bound", bound);
  const bool ok = value >= bound;
  if (!ok) failures.push_back(key + " = " + fmt_num(value) + " below " + fmt_num(bound));
  pass = pass && ok;
  return ok;
}

bool CheckResult::expect(const std::string& key, bool ok) {
  metric(key, ok ? 1.0 : 0.0);
  if (!ok) failures.push_back(key + " failed");
  pass = pass && ok;
  return ok;
}

bool RunReport::pass() const {
  for (const auto& r : results)
    if (!r.pass) return false;
  return true;
}

Json RunReport::to_json() const {
  Json j;
  j["kind"] = kind;
  j["name"] = name;
  j["seed"] = seed;
  j["pass"] = pass();
  j["config"] = config;
  Json arr = Json::array();
  for (const auto& r : results) {
    Json c;
    c["id"] = r.id;
    c["name"] = r.name;
    c["pass"] = r.pass;
    Json m = Json::object();
    for (const auto& [k, v] : r.metrics) m[k] = num(v);
    c["metrics"] = m;
    c["failures"] = r.failures;
    c["notes"] = r.notes;
    c["data"] = r.data;
    Json cs = Json::array();
    for (const auto& cv : r.curves) {
      Json rows = Json::array();
      for (const auto& row : cv.rows) {
        Json jr = Json::array();
        for (double v : row) jr.push_back(num(v));
        rows.push_back(jr);
      }
      cs.push_back({{"name", cv.name}, {"columns", cv.columns}, {"rows", rows}});
    }
    c["curves"] = cs;
    arr.push_back(c);
  }
  j["results"] = arr;
  return j;
}

Json RunReport::timings_json() const {
  Json j;
  j["name"] = name;
  Json arr = Json::array();
  double total = 0.0;
  for (const auto& r : results) {
    arr.push_back({{"id", r.id}, {"seconds", r.seconds}});
    total += r.seconds;
  }
  j["checks"] = arr;
  j["total_seconds"] = total;
  return j;
}

RunReport RunReport::from_json(const Json& j) {
  RunReport r;
  r.kind = j.value("kind", "");
  r.name = j.value("name", "");
  r.seed = j.value("seed", std::uint64_t{0});
  if (j.contains("config")) r.config = j.at("config");
  for (const auto& c : j.at("results")) {
    CheckResult cr;
    cr.id = c.at("id").get<std::string>();
    cr.name = c.value("name", "");
    cr.pass = c.at("pass").get<bool>();
    for (const auto& [k, v] : c.at("metrics").items()) cr.metrics.emplace_back(k, from_num(v));
    if (c.contains("failures")) cr.failures = c.at("failures").get<std::vector<std::string>>();
    if (c.contains("notes")) cr.notes = c.at("notes").get<std::vector<std::string>>();
    if (c.contains("data")) cr.data = c.at("data");
    for (const auto& cv : c.value("curves", Json::array())) {
      Curve curve;
      curve.name = cv.at("name").get<std::string>();
      curve.columns = cv.at("columns").get<std::vector<std::string>>();
      for (const auto& row : cv.at("rows")) {
        std::vector<double> vals;
        for (const auto& v : row) vals.push_back(from_num(v));
        curve.rows.push_back(std::move(vals));
      }
      cr.curves.push_back(std::move(curve));
    }
    r.results.push_back(std::move(cr));
  }
  return r;
}

void write_atomic(const std::string& path, const std::string& contents) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream os(tmp, std::ios::binary | std::ios::trunc);
    if (!os) throw std::runtime_error("cannot write " + tmp.string());
    os << contents;
    os.flush();
    if (!os) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

std::string read_file(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << is.rdbuf();
  return ss.str();
}

void write_report(const RunReport& r, const std::string& path) {
  write_atomic(path, r.to_json().dump(2) + "\n");
  std::string side = path;
  const auto dot = side.rfind(".json");
  side = (dot != std::string::npos && dot + 5 == side.size()) ? side.substr(0, dot) : side;
  write_atomic(side + ".timings.json", r.timings_json().dump(2) + "\n");
}

std::string curve_csv(const Curve& c) {
  std::string out;
  for (std::size_t i = 0; i < c.columns.size(); ++i) {
    if (i) out += ',';
    out += c.columns[i];
  }
  out += '\n';
  for (const auto& row : c.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += fmt_num(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::vector<std::string> emit_curves(const RunReport& r, const std::string& dir) {
  std::vector<std::string> paths;
  for (const auto& res : r.results) {
    for (const auto& c : res.curves) {
      const std::string p = (std::filesystem::path(dir) / (res.id + "_" + c.name + ".csv")).string();
      write_atomic(p, curve_csv(c));
      paths.push_back(p);
    }
  }
  return paths;
}

}  // namespace epiconvex::cli
