#pragma once

#include <cstddef>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "epiconvex/cli/report.hpp"

namespace epiconvex::cli {

/// Config problem with a 1-based source position (0 when unknown).
class ConfigError : public std::runtime_error {
 public:
  ConfigError(const std::string& msg, std::size_t line, std::size_t column)
      : std::runtime_error(msg), line_(line), column_(column) {}
  std::size_t line() const { return line_; }
  std::size_t column() const { return column_; }

 private:
  std::size_t line_, column_;
};

enum class CheckKind {
  bbl_gap,
  derived_gap,
  appendix_limit,
  semigroup,
  hj_quotient,
  trace_gn,
  weighted_trace,
  constants,
  admissibility,
  equivalence_scan,
};

const std::vector<std::string>& check_names();
std::string to_string(CheckKind k);
/// Throws std::invalid_argument for names outside the closed set.
CheckKind check_kind_from_string(const std::string& s);

struct DomainConfig {
  std::string kind = "halfspace";
  std::vector<double> params;
};

struct NormConfig {
  std::string kind = "euclidean";
  double p = 2.0;
  std::vector<double> weights;
};

struct ParamsConfig {
  std::size_t n = 2;
  double p = 1.5;
  double a = 2.0;
  std::vector<double> h_list;
  std::vector<double> eps_list;
};

struct FixtureConfig {
  std::string kind = "extremal";  // extremal | bump | grid
  std::vector<double> center;     // bump
  double radius = 1.0;            // bump
  double amplitude = 0.2;         // bump perturbation of g in the transport checks
  std::string path;               // grid
};

struct QuadConfig {
  double dx = 0.1;
  double R = 20.0;
  double S = 0.0;
  std::size_t levels = 1;  // each level halves dx and doubles R and S
};

struct CheckConfig {
  CheckKind kind;
  Json options = Json::object();
  std::size_t line = 0, column = 0;
};

struct ExperimentConfig {
  std::string name = "experiment";
  std::uint64_t seed = 7;
  DomainConfig domain;
  NormConfig norm;
  ParamsConfig params;
  FixtureConfig fixture;
  QuadConfig quadrature;
  std::string output_dir = "out";
  std::vector<CheckConfig> checks;
  std::string suite;     // "paper" runs the built-in acceptance matrix after the checks
  std::string base_dir;  // directory of the config file, for relative paths
  Json source = Json::object();
};

/// Parses JSON config text. Syntax errors, unknown keys and unknown check
/// names raise ConfigError with the line and column in `text`.
ExperimentConfig parse_config(const std::string& text, const std::string& base_dir = ".");
ExperimentConfig load_config(const std::string& path);

/// 1-based line and column of a byte offset.
std::pair<std::size_t, std::size_t> line_column(const std::string& text, std::size_t offset);

}  // namespace epiconvex::cli
