#include "nfh/pipeline.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <limits>
#include <thread>
#include <utility>

#include "nfh/ctf.hpp"
#include "nfh/nltikh.hpp"
#include "nfh/phantom.hpp"
#include "nfh/regularization.hpp"

namespace nfh {

using nlohmann::json;

namespace {

namespace fs = std::filesystem;

void ensure_parent_directory(const std::string& path) {
  const fs::path parent = fs::path(path).parent_path();
  if (parent.empty()) return;
  std::error_code ec;
  fs::create_directories(parent, ec);
  if (ec) throw IoError("cannot create directory: " + parent.string());
}

double seconds_since(const std::chrono::steady_clock::time_point& t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

RegularizationWeights weights_for(const ReconstructionConfig& config, Index ny, Index nx,
                                  int hologram_count) {
  const FrequencyGrid grid = frequency_sq_grid(padded_extent(ny, config.padding.factor),
                                               padded_extent(nx, config.padding.factor));
  if (!config.three_level)
    return build_weights_two_level(grid, config.fresnel_numbers, config.alpha_low,
                                   config.alpha_high, config.transition_width);
  const double aspect =
      config.detector_aspect > 0.0 ? config.detector_aspect : static_cast<double>(std::max(ny, nx));
  const double beyond =
      config.alpha_beyond_na > 0.0 ? config.alpha_beyond_na : 2.0 * hologram_count;
  return build_weights_three_level(grid, config.fresnel_numbers, aspect, config.alpha_low,
                                   config.alpha_high, beyond, config.transition_width);
}

}  // namespace

SimulateOutputs run_simulate(const SimulateConfig& config) {
  const RealImage phase = sphere_phantom(config.phantom, config.ny, config.nx);
  const MaterialCoupling coupling(config.c_beta_delta);
  const HologramSet data =
      simulate_holograms(phase, coupling, config.fresnel_numbers, config.noise, config.padding);

  std::error_code ec;
  fs::create_directories(config.output_directory, ec);
  if (ec) throw IoError("cannot create output directory: " + config.output_directory);
  const std::string base = (fs::path(config.output_directory) / config.prefix).string();

  SimulateOutputs out;
  out.phase_path = base + "_phase.grid";
  write_real_grid(out.phase_path, phase, "rad", "ground-truth phase");
  for (int j = 0; j < data.count(); ++j) {
    std::string path = base + "_hologram_" + std::to_string(j + 1) + ".grid";
    write_real_grid(path, data.holograms[static_cast<std::size_t>(j)], "normalized intensity",
                    "simulated hologram " + std::to_string(j + 1));
    out.hologram_paths.push_back(std::move(path));
  }

  const json manifest = {{"config", simulate_config_json(config)},
                         {"outputs",
                          {{"phase", out.phase_path}, {"holograms", out.hologram_paths}}}};
  out.manifest_path = base + "_manifest.json";
  write_text_file(out.manifest_path, manifest.dump(2) + "\n");
  return out;
}

ReconstructSummary run_reconstruct(const ReconstructionConfig& config) {
  HologramSet data;
  data.fresnel_numbers = config.fresnel_numbers;
  data.holograms.reserve(config.hologram_paths.size());
  for (const std::string& path : config.hologram_paths)
    data.holograms.push_back(read_real_grid(path));
  validate_hologram_set(data);

  ConstraintSet constraints;
  constraints.negativity = config.negativity;
  if (!config.support_mask_path.empty())
    constraints.support = read_mask_grid(config.support_mask_path);
  if (config.has_box) constraints.box = std::make_pair(config.box_lo, config.box_hi);
  if (constraints.any()) validate_constraints(constraints, data.ny(), data.nx());

  const MaterialCoupling coupling(config.c_beta_delta);
  const RegularizationWeights weights = weights_for(config, data.ny(), data.nx(), data.count());

  ReconstructSummary summary;
  summary.method = config.method;

  RealImage phi;
  ConvergenceTrace trace;
  const auto t0 = std::chrono::steady_clock::now();
  if (config.method == "ctf") {
    phi = ctf_reconstruct(data, coupling, weights, config.padding);
    trace.converged = true;
    trace.message = "closed-form solution";
  } else if (config.method == "cctf") {
    CctfResult result =
        cctf_reconstruct(data, coupling, weights, constraints, config.cctf, config.padding);
    phi = std::move(result.phi);
    trace = std::move(result.trace);
  } else {
    NltikhResult result =
        nltikh_reconstruct(data, coupling, weights, constraints, config.nltikh, config.padding);
    phi = std::move(result.phi);
    trace = std::move(result.trace);
  }
  summary.wall_time_s = seconds_since(t0);
  summary.converged = trace.converged;
  summary.iterations = trace.iterations();
  summary.message = trace.message;

  ensure_parent_directory(config.output_phase);
  write_real_grid(config.output_phase, phi, "rad", "reconstructed phase, method " + config.method);
  summary.phase_path = config.output_phase;

  if (!config.output_trace.empty()) {
    ensure_parent_directory(config.output_trace);
    write_trace_csv(config.output_trace, trace);
    summary.trace_path = config.output_trace;
  }
  if (!config.output_summary.empty()) {
    const json doc = {{"method", summary.method},
                      {"converged", summary.converged},
                      {"iterations", summary.iterations},
                      {"message", summary.message},
                      {"wall_time_s", summary.wall_time_s},
                      {"config", reconstruction_config_json(config)},
                      {"outputs",
                       {{"phase", summary.phase_path}, {"trace", summary.trace_path}}}};
    ensure_parent_directory(config.output_summary);
    write_text_file(config.output_summary, doc.dump(2) + "\n");
    summary.summary_path = config.output_summary;
  }
  return summary;
}

// ---------------------------------------------------------------------------
// Benchmark

namespace {

struct BenchmarkRow {
  std::string scenario;
  std::string method;
  int iterations = 0;
  bool converged = false;
  double rel_error = 0.0;
  double r_grad = 0.0;
  double r_value = 0.0;
  double wall_time_s = 0.0;
};

std::string format_row(const BenchmarkRow& r) {
  char line[384];
  std::snprintf(line, sizeof line, "%s,%s,%d,%s,%.17g,%.17g,%.17g,%.17g\n", r.scenario.c_str(),
                r.method.c_str(), r.iterations, r.converged ? "true" : "false", r.rel_error,
                r.r_grad, r.r_value, r.wall_time_s);
  return line;
}

std::vector<BenchmarkRow> run_scenario(const BenchmarkScenario& scenario, bool include_timing) {
  const SimulateConfig sim = parse_simulate_config(load_json_file(scenario.manifest_path));
  const RealImage truth = sphere_phantom(sim.phantom, sim.ny, sim.nx);
  const MaterialCoupling coupling(sim.c_beta_delta);
  const HologramSet data =
      simulate_holograms(truth, coupling, sim.fresnel_numbers, sim.noise, sim.padding);

  const FrequencyGrid grid =
      frequency_sq_grid(padded_extent(data.ny(), scenario.padding.factor),
                        padded_extent(data.nx(), scenario.padding.factor));
  const RegularizationWeights weights =
      build_weights_two_level(grid, sim.fresnel_numbers, scenario.alpha_low, scenario.alpha_high,
                              scenario.transition_width);
  ConstraintSet constraints;
  constraints.negativity = scenario.negativity;

  // Long fixed-budget run shared by every row's relative objective gap.
  NltikhOptions reference = scenario.nltikh;
  reference.fixed_iterations = scenario.reference_iterations;
  reference.max_iterations = std::max(reference.max_iterations, scenario.reference_iterations);
  const RealImage phi_reference =
      nltikh_reconstruct(data, coupling, weights, constraints, reference, scenario.padding).phi;

  const double truth_norm = l2_norm(truth);
  std::vector<BenchmarkRow> rows;

  auto push = [&](const std::string& method, const RealImage& phi, int iterations, bool converged,
                  double wall_time_s) {
    BenchmarkRow row;
    row.scenario = scenario.name;
    row.method = method;
    row.iterations = iterations;
    row.converged = converged;
    row.rel_error = truth_norm > 0.0 ? relative_error(phi, truth)
                                     : std::numeric_limits<double>::quiet_NaN();
    row.r_grad = gradient_residual(phi, data, coupling, weights, scenario.padding);
    try {
      row.r_value = value_residual(phi, phi_reference, data, coupling, weights, scenario.padding);
    } catch (const std::domain_error&) {
      row.r_value = std::numeric_limits<double>::quiet_NaN();
    }
    row.wall_time_s = include_timing ? wall_time_s : 0.0;
    rows.push_back(std::move(row));
  };

  for (const std::string& method : scenario.methods) {
    if (method == "ctf") {
      const auto t0 = std::chrono::steady_clock::now();
      const RealImage phi = ctf_reconstruct(data, coupling, weights, scenario.padding);
      push(method, phi, 0, true, seconds_since(t0));
    } else if (method == "cctf") {
      const auto t0 = std::chrono::steady_clock::now();
      const CctfResult result =
          cctf_reconstruct(data, coupling, weights, constraints, scenario.cctf, scenario.padding);
      push(method, result.phi, result.trace.iterations(), result.trace.converged,
           seconds_since(t0));
    } else if (method == "nltikh" || method == "nltikh-cold") {
      NltikhOptions options = scenario.nltikh;
      if (method == "nltikh-cold") options.warm_start = false;
      const auto t0 = std::chrono::steady_clock::now();
      const NltikhResult result =
          nltikh_reconstruct(data, coupling, weights, constraints, options, scenario.padding);
      push(method, result.phi, result.trace.iterations(), result.trace.converged,
           seconds_since(t0));
    } else {  // nltikh-constant, one row per stepsize
      for (double tau : scenario.constant_stepsizes) {
        NltikhOptions options = scenario.nltikh;
        options.stepsize.kind = StepsizeKind::Constant;
        options.stepsize.constant_value = tau;
        char label[64];
        std::snprintf(label, sizeof label, "nltikh-constant:%g", tau);
        const auto t0 = std::chrono::steady_clock::now();
        const NltikhResult result =
            nltikh_reconstruct(data, coupling, weights, constraints, options, scenario.padding);
        push(label, result.phi, result.trace.iterations(), result.trace.converged,
             seconds_since(t0));
      }
    }
  }
  return rows;
}

}  // namespace

std::string run_benchmark_csv(const BenchmarkConfig& config, int threads, bool include_timing) {
  std::string out = "scenario,method,iterations,converged,rel_error,r_grad,r_value,wall_time_s\n";
  const std::size_t n = config.scenarios.size();
  std::vector<std::vector<BenchmarkRow>> results(n);

  const std::size_t workers =
      std::min<std::size_t>(threads < 1 ? 1 : static_cast<std::size_t>(threads), n);
  if (workers <= 1) {
    for (std::size_t i = 0; i < n; ++i)
      results[i] = run_scenario(config.scenarios[i], include_timing);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::exception_ptr> errors(n);
    auto work = [&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          results[i] = run_scenario(config.scenarios[i], include_timing);
        } catch (...) {
          errors[i] = std::current_exception();
        }
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
    for (const std::exception_ptr& e : errors)
      if (e) std::rethrow_exception(e);
  }

  for (const auto& rows : results)
    for (const BenchmarkRow& row : rows) out += format_row(row);
  return out;
}

}  // namespace nfh
