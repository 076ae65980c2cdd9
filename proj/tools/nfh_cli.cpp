#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <cstdint>
#include <cstdio>
#include <exception>
#include <iostream>
#include <optional>
#include <string>

#include "nfh/geometry.hpp"
#include "nfh/io.hpp"
#include "nfh/pipeline.hpp"

namespace {

// 0 success, 2 validation error, 3 non-convergence, 4 I/O error; anything
// else unexpected maps to 1.
constexpr int kExitValidation = 2;
constexpr int kExitNotConverged = 3;
constexpr int kExitIo = 4;

int run_simulate(const std::string& config_path, const std::string& out_dir,
                 const std::optional<std::uint64_t>& seed) {
  nfh::SimulateConfig config = nfh::parse_simulate_config(nfh::load_json_file(config_path));
  if (!out_dir.empty()) config.output_directory = out_dir;
  if (seed) config.noise.seed = *seed;
  const nfh::SimulateOutputs outputs = nfh::run_simulate(config);
  std::cout << "phase: " << outputs.phase_path << "\n";
  for (std::size_t j = 0; j < outputs.hologram_paths.size(); ++j)
    std::cout << "hologram " << j + 1 << ": " << outputs.hologram_paths[j] << "\n";
  std::cout << "manifest: " << outputs.manifest_path << "\n";
  return 0;
}

int run_reconstruct(const std::string& config_path, const std::string& method,
                    const std::string& out_path, const std::optional<std::uint64_t>& seed,
                    bool allow_nonconverged) {
  nlohmann::json doc = nfh::load_json_file(config_path);
  if (!method.empty() && doc.is_object()) doc["method"] = method;
  nfh::ReconstructionConfig config = nfh::parse_reconstruction_config(doc);
  if (!out_path.empty()) config.output_phase = out_path;
  if (seed) {
    config.seed = *seed;
    config.nltikh.seed = *seed;
  }
  const nfh::ReconstructSummary summary = nfh::run_reconstruct(config);
  std::cout << "method: " << summary.method << "\n"
            << "iterations: " << summary.iterations << "\n"
            << "converged: " << (summary.converged ? "true" : "false") << "\n";
  char wall[64];
  std::snprintf(wall, sizeof wall, "%.3f", summary.wall_time_s);
  std::cout << "wall_time_s: " << wall << "\n"
            << "phase: " << summary.phase_path << "\n";
  if (!summary.trace_path.empty()) std::cout << "trace: " << summary.trace_path << "\n";
  if (!summary.summary_path.empty()) std::cout << "summary: " << summary.summary_path << "\n";
  if (!summary.converged) {
    std::cerr << "not converged: " << summary.message << "\n";
    if (!allow_nonconverged) return kExitNotConverged;
  }
  return 0;
}

int run_benchmark(const std::string& config_path, const std::string& out_path, int threads,
                  bool no_timing) {
  const nfh::BenchmarkConfig config =
      nfh::parse_benchmark_config(nfh::load_json_file(config_path));
  const std::string table = nfh::run_benchmark_csv(config, threads, !no_timing);
  if (out_path.empty()) std::cout << table;
  else nfh::write_text_file(out_path, table);
  return 0;
}

int run_geometry(double z01, double z02, double pitch, double energy) {
  const nfh::EffectiveParameters p =
      nfh::effective_parameters({z01, z02, pitch, energy});
  const nlohmann::json doc = {{"magnification", p.magnification},
                              {"effective_pixel_m", p.effective_pixel_m},
                              {"effective_distance_m", p.effective_distance_m},
                              {"wavelength_m", p.wavelength_m},
                              {"fresnel_number", p.fresnel_number}};
  std::cout << doc.dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Near-field holography phase retrieval"};
  app.require_subcommand(1);

  std::string config_path;
  std::string method;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  bool allow_nonconverged = false;
  bool no_timing = false;
  int threads = 1;
  double z01 = 0.0, z02 = 0.0, pitch = 0.0, energy = 0.0;

  CLI::App* simulate = app.add_subcommand("simulate", "Render a phantom and its holograms");
  simulate->add_option("--config", config_path, "Simulation config or manifest JSON")->required();
  simulate->add_option("--out", out_path, "Override the output directory");
  simulate->add_option("--seed", seed, "Override the noise seed");

  CLI::App* reconstruct = app.add_subcommand("reconstruct", "Reconstruct a phase map");
  reconstruct->add_option("--config", config_path, "Reconstruction config JSON")->required();
  reconstruct->add_option("--method", method, "Override the method (ctf | cctf | nltikh)");
  reconstruct->add_option("--out", out_path, "Override the phase output path");
  reconstruct->add_option("--seed", seed, "Override the stepsize-probe seed");
  reconstruct->add_flag("--allow-nonconverged", allow_nonconverged,
                        "Exit 0 even when the solver did not converge");

  CLI::App* benchmark = app.add_subcommand("benchmark", "Run scenario/method comparisons");
  benchmark->add_option("--config", config_path, "Benchmark scenario list JSON")->required();
  benchmark->add_option("--out", out_path, "Write the CSV table here instead of stdout");
  benchmark->add_option("--threads", threads, "Worker pool size")
      ->envname("NFH_THREADS")
      ->check(CLI::PositiveNumber);
  benchmark->add_flag("--no-timing", no_timing, "Zero the wall-time column for byte determinism");

  CLI::App* geometry = app.add_subcommand("geometry", "Derive effective imaging parameters");
  geometry->add_option("--z01", z01, "Source to sample distance [m]")->required();
  geometry->add_option("--z02", z02, "Source to detector distance [m]")->required();
  geometry->add_option("--pitch", pitch, "Detector pixel pitch [m]")->required();
  geometry->add_option("--energy", energy, "Photon energy [keV]")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitValidation;
  }

  try {
    if (simulate->parsed()) return run_simulate(config_path, out_path, seed);
    if (reconstruct->parsed())
      return run_reconstruct(config_path, method, out_path, seed, allow_nonconverged);
    if (benchmark->parsed()) return run_benchmark(config_path, out_path, threads, no_timing);
    return run_geometry(z01, z02, pitch, energy);
  } catch (const nfh::ConfigError& e) {
    std::cerr << e.what() << "\n";
    return kExitValidation;
  } catch (const nfh::IoError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
}
