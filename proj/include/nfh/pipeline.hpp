#pragma once

#include <string>
#include <vector>

#include "nfh/io.hpp"

namespace nfh {

// Orchestration behind the CLI subcommands. Everything here is also usable
// programmatically, which is how the tests drive it.

struct SimulateOutputs {
  std::string phase_path;
  std::vector<std::string> hologram_paths;
  std::string manifest_path;
};

// Renders the phantom, simulates the holograms, and writes phase, hologram
// and manifest files under the configured directory/prefix. The manifest
// embeds the resolved config, so feeding it back through `simulate`
// reproduces the same bytes.
SimulateOutputs run_simulate(const SimulateConfig& config);

struct ReconstructSummary {
  std::string method;
  bool converged = false;
  int iterations = 0;
  std::string message;
  double wall_time_s = 0.0;
  std::string phase_path;
  std::string trace_path;
  std::string summary_path;
};

// Loads the holograms, dispatches on the configured method, and writes the
// phase (always), the trace CSV and the run summary (when paths are given).
// Inputs are read and validated before any output file is created.
ReconstructSummary run_reconstruct(const ReconstructionConfig& config);

// Runs every scenario/method pair and renders the results table. Scenarios
// regenerate their data in memory from simulate manifests, so rows are
// deterministic given the seeds; wall times are zeroed when include_timing
// is false to keep reruns byte-identical. threads > 1 distributes scenarios
// over a worker pool.
std::string run_benchmark_csv(const BenchmarkConfig& config, int threads, bool include_timing);

}  // namespace nfh
