#pragma once

#include <functional>
#include <set>
#include <string>

#include "epiconvex/cli/report.hpp"

namespace epiconvex::cli {

struct SuiteOptions {
  std::string data_dir;   // holds counterexample/{f,g}.grid
  std::set<int> only;     // criterion numbers to run; empty runs all
  std::function<void(const CheckResult&)> on_result;
};

/// Number of criteria the built-in matrix covers (1..kSuiteCriteria).
inline constexpr int kSuiteCriteria = 13;

/// The built-in acceptance matrix. Every tolerance is a named constant in
/// suite.cpp; results carry ids "C01".."C13".
RunReport run_paper_suite(const SuiteOptions& opt);

/// Default data directory: EPICONVEX_DATA_DIR if set, else the source tree's data/.
std::string default_data_dir();

}  // namespace epiconvex::cli
