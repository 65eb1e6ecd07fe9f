#pragma once

#include "epiconvex/cli/config.hpp"
#include "epiconvex/cli/report.hpp"

namespace epiconvex::cli {

/// Runs one declared check. Hypothesis violations and invalid inputs become a
/// failed result carrying the message; they never propagate.
CheckResult run_check(const ExperimentConfig& cfg, const CheckConfig& check, std::size_t index);

/// Runs every check in declaration order.
RunReport run_config(const ExperimentConfig& cfg);

}  // namespace epiconvex::cli
