#pragma once

#include <nlohmann/json_fwd.hpp>

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "nfh/constraints.hpp"
#include "nfh/ctf.hpp"
#include "nfh/nltikh.hpp"
#include "nfh/pad.hpp"
#include "nfh/phantom.hpp"
#include "nfh/trace.hpp"
#include "nfh/types.hpp"

namespace nfh {

// Filesystem / format failures (missing files, malformed sidecars, short
// payloads). Distinct from ConfigError so the CLI can map exit codes.
class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Semantic configuration failures; carries one diagnostic per invalid field,
// each naming the field path.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(std::vector<std::string> details);
  const std::vector<std::string>& details() const { return details_; }

 private:
  std::vector<std::string> details_;
};

// Grid files: raw little-endian row-major payload plus a JSON sidecar at
// payload path + ".json" holding {shape, dtype, unit, notes}.
enum class GridDtype { f64, c128, u8_mask };

struct GridInfo {
  Index ny = 0;
  Index nx = 0;
  GridDtype dtype = GridDtype::f64;
  std::string unit;
  std::string notes;
};

void write_real_grid(const std::string& path, const RealImage& img, const std::string& unit,
                     const std::string& notes = "");
void write_complex_grid(const std::string& path, const ComplexField& img, const std::string& unit,
                        const std::string& notes = "");
void write_mask_grid(const std::string& path, const MaskImage& img, const std::string& notes = "");

GridInfo read_grid_info(const std::string& path);
RealImage read_real_grid(const std::string& path);
ComplexField read_complex_grid(const std::string& path);
MaskImage read_mask_grid(const std::string& path);

// Trace serialization: fixed column order, 17 significant digits so values
// survive a text round trip bit-exactly.
std::string serialize_trace_csv(const ConvergenceTrace& trace);
void write_trace_csv(const std::string& path, const ConvergenceTrace& trace);

// Reconstruction run description. Defaults mirror the solver defaults; the
// fully resolved form is serialized into the run summary for provenance.
struct ReconstructionConfig {
  std::string method = "nltikh";  // ctf | cctf | nltikh
  std::vector<std::string> hologram_paths;
  std::vector<double> fresnel_numbers;
  double c_beta_delta = 0.0;
  double alpha_low = 1e-3;
  double alpha_high = 1e-1;
  bool three_level = false;
  double alpha_beyond_na = 0.0;    // 0 with three_level means "auto" (2J)
  double transition_width = 0.1;
  double detector_aspect = 0.0;    // 0 means larger detector dimension
  bool negativity = false;
  std::string support_mask_path;
  bool has_box = false;
  double box_lo = 0.0;
  double box_hi = 0.0;
  CctfOptions cctf;
  NltikhOptions nltikh;
  Padding padding;
  std::string output_phase;
  std::string output_trace;
  std::string output_summary;
  std::uint64_t seed = 0;
};

// Simulation run description (phantom, imaging, noise, outputs).
struct SimulateConfig {
  Index ny = 0;
  Index nx = 0;
  SpherePhantomSpec phantom;
  double c_beta_delta = 0.0;
  std::vector<double> fresnel_numbers;
  NoiseSpec noise;
  Padding padding;
  std::string output_directory = ".";
  std::string prefix = "sim";
};

// Benchmark scenario: a simulate manifest to regenerate data from, plus the
// reconstruction parameters and which method rows to emit.
struct BenchmarkScenario {
  std::string name;
  std::string manifest_path;
  std::vector<std::string> methods;  // ctf | cctf | nltikh | nltikh-cold | nltikh-constant
  std::vector<double> constant_stepsizes;
  int reference_iterations = 300;
  double alpha_low = 1e-3;
  double alpha_high = 1e-1;
  double transition_width = 0.1;
  bool negativity = false;
  CctfOptions cctf;
  NltikhOptions nltikh;
  Padding padding;
};

struct BenchmarkConfig {
  std::vector<BenchmarkScenario> scenarios;
};

// Parsers throw ConfigError listing every invalid field. Serializers emit
// the fully resolved configuration (all defaults explicit).
ReconstructionConfig parse_reconstruction_config(const nlohmann::json& j);
SimulateConfig parse_simulate_config(const nlohmann::json& j);
BenchmarkConfig parse_benchmark_config(const nlohmann::json& j);

nlohmann::json reconstruction_config_json(const ReconstructionConfig& config);
nlohmann::json simulate_config_json(const SimulateConfig& config);

nlohmann::json load_json_file(const std::string& path);
void write_text_file(const std::string& path, const std::string& text);

}  // namespace nfh
