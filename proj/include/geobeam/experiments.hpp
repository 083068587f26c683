#pragma once

#include "geobeam/config.hpp"
#include "geobeam/report.hpp"

namespace geobeam::cli {

struct RunResult {
  std::vector<ReportRow> rows;
  int exit_code = 0;  // 0 ok, 2 infeasible target / failed verification
};

// Executes the configured experiment. Deterministic for a fixed config
// (seeds included), regardless of the thread count. Throws ConfigError for
// invalid configurations; infeasible targets produce an error row and exit
// code 2 instead of throwing.
RunResult run(const ExperimentConfig& config);

}  // namespace geobeam::cli
