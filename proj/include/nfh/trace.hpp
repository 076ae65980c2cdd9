#pragma once

#include <limits>
#include <string>
#include <vector>

#include "nfh/types.hpp"

namespace nfh {

// One record per completed solver iteration. Fields a given solver does not
// produce stay NaN (objective values are never computed just for logging
// when that would change the per-iteration cost contract).
struct TraceRow {
  int iteration = 0;
  double objective = std::numeric_limits<double>::quiet_NaN();
  double primal_residual = std::numeric_limits<double>::quiet_NaN();
  double dual_residual = std::numeric_limits<double>::quiet_NaN();
  double gradient_residual = std::numeric_limits<double>::quiet_NaN();
  double stepsize = std::numeric_limits<double>::quiet_NaN();
  int backtracks = 0;
  double elapsed_s = 0.0;
};

struct ConvergenceTrace {
  std::vector<TraceRow> rows;
  bool converged = false;
  std::string message;

  int iterations() const { return static_cast<int>(rows.size()); }
};

}  // namespace nfh
