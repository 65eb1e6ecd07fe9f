#include "epiconvex/cli/config.hpp"

#include <algorithm>
#include <filesystem>
#include <map>
#include <set>

namespace epiconvex::cli {

namespace {

const std::vector<std::pair<CheckKind, std::string>>& check_table() {
  static const std::vector<std::pair<CheckKind, std::string>> t = {
      {CheckKind::bbl_gap, "bbl_gap"},
      {CheckKind::derived_gap, "derived_gap"},
      {CheckKind::appendix_limit, "appendix_limit"},
      {CheckKind::semigroup, "semigroup"},
      {CheckKind::hj_quotient, "hj_quotient"},
      {CheckKind::trace_gn, "trace_gn"},
      {CheckKind::weighted_trace, "weighted_trace"},
      {CheckKind::constants, "constants"},
      {CheckKind::admissibility, "admissibility"},
      {CheckKind::equivalence_scan, "equivalence_scan"},
  };
  return t;
}

std::string escape_token(const std::string& k) {
  std::string out;
  for (char c : k) {
    if (c == '~') out += "~0";
    else if (c == '/') out += "~1";
    else out += c;
  }
  return out;
}

// Start offsets of every value (and, under "<pointer>#key", every object key)
// of an already validated JSON text, indexed by JSON pointer.
class PositionIndex {
 public:
  explicit PositionIndex(const std::string& text) : s_(text) { value(""); }

  std::size_t at(const std::string& pointer) const {
    auto it = pos_.find(pointer);
    return it == pos_.end() ? 0 : it->second;
  }
  bool has(const std::string& pointer) const { return pos_.count(pointer) != 0; }

 private:
  void ws() {
    while (i_ < s_.size() && (s_[i_] == ' ' || s_[i_] == '\t' || s_[i_] == '\n' || s_[i_] == '\r')) ++i_;
  }
  std::string string_token() {
    std::string out;
    ++i_;  // opening quote
    while (i_ < s_.size() && s_[i_] != '"') {
      if (s_[i_] == '\\' && i_ + 1 < s_.size()) {
        out += s_[i_ + 1];
        i_ += 2;
        continue;
      }
      out += s_[i_++];
    }
    ++i_;
    return out;
  }
  void value(const std::string& path) {
    ws();
    if (i_ >= s_.size()) return;
    pos_[path] = i_;
    const char c = s_[i_];
    if (c == '{') {
      ++i_;
      for (;;) {
        ws();
        if (i_ >= s_.size() || s_[i_] == '}') break;
        const std::size_t kpos = i_;
        const std::string key = string_token();
        const std::string child = path + "/" + escape_token(key);
        pos_[child + "#key"] = kpos;
        ws();
        ++i_;  // ':'
        value(child);
        ws();
        if (i_ < s_.size() && s_[i_] == ',') ++i_;
      }
      ++i_;
    } else if (c == '[') {
      ++i_;
      for (std::size_t k = 0;; ++k) {
        ws();
        if (i_ >= s_.size() || s_[i_] == ']') break;
        value(path + "/" + std::to_string(k));
        ws();
        if (i_ < s_.size() && s_[i_] == ',') ++i_;
      }
      ++i_;
    } else if (c == '"') {
      string_token();
    } else {
      while (i_ < s_.size() && s_[i_] != ',' && s_[i_] != ']' && s_[i_] != '}' && s_[i_] != ' ' &&
             s_[i_] != '\n' && s_[i_] != '\t' && s_[i_] != '\r')
        ++i_;
    }
  }

  const std::string& s_;
  std::size_t i_ = 0;
  std::map<std::string, std::size_t> pos_;
};

struct Ctx {
  const std::string& text;
  PositionIndex idx;

  [[noreturn]] void fail(const std::string& msg, const std::string& pointer, bool key = false) const {
    const std::size_t off = idx.at(key ? pointer + "#key" : pointer);
    const auto [l, c] = line_column(text, off);
    throw ConfigError(msg + " at line " + std::to_string(l) + ", column " + std::to_string(c), l, c);
  }

  void only_keys(const Json& j, const std::string& pointer, std::initializer_list<const char*> keys) const {
    if (!j.is_object()) fail("expected an object", pointer);
    const std::set<std::string> allowed(keys.begin(), keys.end());
    for (const auto& [k, v] : j.items()) {
      if (!allowed.count(k)) fail("unknown key '" + k + "'", pointer + "/" + escape_token(k), true);
    }
  }

  template <class T>
  T get(const Json& j, const std::string& key, const std::string& pointer, T fallback) const {
    if (!j.contains(key)) return fallback;
    try {
      return j.at(key).get<T>();
    } catch (const nlohmann::json::exception&) {
      fail("bad value for '" + key + "'", pointer + "/" + escape_token(key));
    }
  }
};

}  // namespace

const std::vector<std::string>& check_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> v;
    for (const auto& [k, s] : check_table()) v.push_back(s);
    return v;
  }();
  return names;
}

std::string to_string(CheckKind k) {
  for (const auto& [kk, s] : check_table())
    if (kk == k) return s;
  return "?";
}

CheckKind check_kind_from_string(const std::string& s) {
  for (const auto& [k, name] : check_table())
    if (name == s) return k;
  throw std::invalid_argument("unknown check '" + s + "'");
}

std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t offset) {
  std::size_t line = 1, col = 1;
  for (std::size_t i = 0; i < offset && i < text.size(); ++i) {
    if (text[i] == '\n') {
      ++line;
      col = 1;
    } else {
      ++col;
    }
  }
  return {line, col};
}

ExperimentConfig parse_config(const std::string& text, const std::string& base_dir) {
  Json j;
  try {
    j = Json::parse(text);
  } catch (const nlohmann::json::parse_error& e) {
    const auto [l, c] = line_column(text, e.byte > 0 ? e.byte - 1 : 0);
    throw ConfigError("syntax error at line " + std::to_string(l) + ", column " + std::to_string(c) + ": " +
                          e.what(),
                      l, c);
  }
  const Ctx ctx{text, PositionIndex(text)};
  ctx.only_keys(j, "", {"name", "description", "seed", "domain", "norm", "params", "fixture", "quadrature",
                        "output", "checks", "suite"});

  ExperimentConfig cfg;
  cfg.source = j;
  cfg.base_dir = base_dir;
  cfg.name = ctx.get<std::string>(j, "name", "", cfg.name);
  cfg.seed = ctx.get<std::uint64_t>(j, "seed", "", cfg.seed);

  if (j.contains("domain")) {
    const auto& d = j["domain"];
    ctx.only_keys(d, "/domain", {"kind", "params"});
    cfg.domain.kind = ctx.get<std::string>(d, "kind", "/domain", cfg.domain.kind);
    static const std::set<std::string> kinds = {"halfspace", "cone", "paraboloid", "affine_max"};
    if (!kinds.count(cfg.domain.kind)) ctx.fail("unknown domain kind '" + cfg.domain.kind + "'", "/domain/kind");
    cfg.domain.params = ctx.get<std::vector<double>>(d, "params", "/domain", {});
  }
  if (j.contains("norm")) {
    const auto& d = j["norm"];
    ctx.only_keys(d, "/norm", {"kind", "p", "weights"});
    cfg.norm.kind = ctx.get<std::string>(d, "kind", "/norm", cfg.norm.kind);
    static const std::set<std::string> kinds = {"euclidean", "p_norm", "weighted_p_norm"};
    if (!kinds.count(cfg.norm.kind)) ctx.fail("unknown norm kind '" + cfg.norm.kind + "'", "/norm/kind");
    cfg.norm.p = ctx.get<double>(d, "p", "/norm", cfg.norm.p);
    cfg.norm.weights = ctx.get<std::vector<double>>(d, "weights", "/norm", {});
  }
  if (j.contains("params")) {
    const auto& d = j["params"];
    ctx.only_keys(d, "/params", {"n", "p", "a", "h_list", "eps_list"});
    cfg.params.n = ctx.get<std::size_t>(d, "n", "/params", cfg.params.n);
    cfg.params.p = ctx.get<double>(d, "p", "/params", cfg.params.p);
    cfg.params.a = ctx.get<double>(d, "a", "/params", cfg.params.a);
    cfg.params.h_list = ctx.get<std::vector<double>>(d, "h_list", "/params", {});
    cfg.params.eps_list = ctx.get<std::vector<double>>(d, "eps_list", "/params", {});
  }
  if (j.contains("fixture")) {
    const auto& d = j["fixture"];
    ctx.only_keys(d, "/fixture", {"kind", "center", "radius", "amplitude", "path"});
    cfg.fixture.kind = ctx.get<std::string>(d, "kind", "/fixture", cfg.fixture.kind);
    static const std::set<std::string> kinds = {"extremal", "bump", "grid"};
    if (!kinds.count(cfg.fixture.kind))
      ctx.fail("unknown fixture kind '" + cfg.fixture.kind + "'", "/fixture/kind");
    cfg.fixture.center = ctx.get<std::vector<double>>(d, "center", "/fixture", {});
    cfg.fixture.radius = ctx.get<double>(d, "radius", "/fixture", cfg.fixture.radius);
    cfg.fixture.amplitude = ctx.get<double>(d, "amplitude", "/fixture", cfg.fixture.amplitude);
    cfg.fixture.path = ctx.get<std::string>(d, "path", "/fixture", "");
    if (cfg.fixture.kind == "grid" && cfg.fixture.path.empty())
      ctx.fail("grid fixture needs a path", "/fixture");
  }
  if (j.contains("quadrature")) {
    const auto& d = j["quadrature"];
    ctx.only_keys(d, "/quadrature", {"dx", "R", "S", "levels"});
    cfg.quadrature.dx = ctx.get<double>(d, "dx", "/quadrature", cfg.quadrature.dx);
    cfg.quadrature.R = ctx.get<double>(d, "R", "/quadrature", cfg.quadrature.R);
    cfg.quadrature.S = ctx.get<double>(d, "S", "/quadrature", cfg.quadrature.S);
    cfg.quadrature.levels = ctx.get<std::size_t>(d, "levels", "/quadrature", cfg.quadrature.levels);
    if (cfg.quadrature.levels == 0) ctx.fail("levels must be at least 1", "/quadrature/levels");
  }
  if (j.contains("output")) {
    const auto& d = j["output"];
    ctx.only_keys(d, "/output", {"dir"});
    cfg.output_dir = ctx.get<std::string>(d, "dir", "/output", cfg.output_dir);
  }
  if (j.contains("suite")) {
    cfg.suite = ctx.get<std::string>(j, "suite", "", "");
    if (cfg.suite != "paper") ctx.fail("unknown suite '" + cfg.suite + "' (expected: paper)", "/suite");
  }
  if (j.contains("checks")) {
    const auto& arr = j["checks"];
    if (!arr.is_array()) ctx.fail("checks must be an array", "/checks");
    for (std::size_t k = 0; k < arr.size(); ++k) {
      const std::string ptr = "/checks/" + std::to_string(k);
      const auto& item = arr[k];
      std::string name;
      std::string name_ptr = ptr;
      Json options = Json::object();
      if (item.is_string()) {
        name = item.get<std::string>();
      } else if (item.is_object()) {
        if (!item.contains("check") || !item["check"].is_string()) ctx.fail("check entry needs a \"check\" name", ptr);
        name = item["check"].get<std::string>();
        name_ptr = ptr + "/check";
        options = item;
        options.erase("check");
      } else {
        ctx.fail("check entry must be a name or an object", ptr);
      }
      CheckConfig cc{};
      try {
        cc.kind = check_kind_from_string(name);
      } catch (const std::invalid_argument&) {
        std::string list;
        for (const auto& s : check_names()) list += (list.empty() ? "" : ", ") + s;
        ctx.fail("unknown check '" + name + "' (expected one of: " + list + ")", name_ptr);
      }
      cc.options = options;
      const auto [l, c] = line_column(text, ctx.idx.at(name_ptr));
      cc.line = l;
      cc.column = c;
      cfg.checks.push_back(std::move(cc));
    }
  }
  return cfg;
}

ExperimentConfig load_config(const std::string& path) {
  const std::string text = read_file(path);
  const auto parent = std::filesystem::path(path).parent_path();
  try {
    return parse_config(text, parent.empty() ? "." : parent.string());
  } catch (const ConfigError& e) {
    throw ConfigError(path + ": " + e.what(), e.line(), e.column());
  }
}

}  // namespace epiconvex::cli
