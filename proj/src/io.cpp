#include "nfh/io.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

namespace nfh {

using nlohmann::json;

static_assert(std::endian::native == std::endian::little,
              "grid payloads are little-endian; big-endian hosts are unsupported");

namespace {

std::string join_details(const std::vector<std::string>& details) {
  std::string out = "configuration invalid:";
  for (const auto& d : details) out += "\n  " + d;
  return out;
}

}  // namespace

ConfigError::ConfigError(std::vector<std::string> details)
    : std::runtime_error(join_details(details)), details_(std::move(details)) {}

// ---------------------------------------------------------------------------
// Grid files

namespace {

std::string dtype_name(GridDtype dtype) {
  switch (dtype) {
    case GridDtype::f64: return "f64";
    case GridDtype::c128: return "c128";
    case GridDtype::u8_mask: return "u8-mask";
  }
  return "f64";
}

void write_sidecar(const std::string& path, const GridInfo& info) {
  json j;
  j["shape"] = {info.ny, info.nx};
  j["dtype"] = dtype_name(info.dtype);
  j["unit"] = info.unit;
  j["notes"] = info.notes;
  std::ofstream out(path + ".json", std::ios::trunc);
  if (!out) throw IoError("cannot write sidecar: " + path + ".json");
  out << j.dump(2) << "\n";
  if (!out) throw IoError("failed writing sidecar: " + path + ".json");
}

void write_payload(const std::string& path, const char* bytes, std::size_t count) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write grid payload: " + path);
  out.write(bytes, static_cast<std::streamsize>(count));
  if (!out) throw IoError("failed writing grid payload: " + path);
}

std::vector<char> read_payload(const std::string& path, std::size_t expected) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open grid payload: " + path);
  std::vector<char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() != expected)
    throw IoError("grid payload size mismatch for " + path + ": expected " +
                  std::to_string(expected) + " bytes, found " + std::to_string(bytes.size()));
  return bytes;
}

}  // namespace

GridInfo read_grid_info(const std::string& path) {
  const std::string sidecar = path + ".json";
  std::ifstream in(sidecar);
  if (!in) throw IoError("missing grid sidecar: " + sidecar);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw IoError("malformed grid sidecar " + sidecar + ": " + e.what());
  }
  GridInfo info;
  if (!j.contains("shape") || !j["shape"].is_array() || j["shape"].size() != 2 ||
      !j["shape"][0].is_number_integer() || !j["shape"][1].is_number_integer())
    throw IoError("grid sidecar " + sidecar + ": shape must be [ny, nx]");
  info.ny = j["shape"][0].get<Index>();
  info.nx = j["shape"][1].get<Index>();
  if (info.ny < 1 || info.nx < 1)
    throw IoError("grid sidecar " + sidecar + ": shape must be positive");
  const std::string dtype = j.value("dtype", "");
  if (dtype == "f64") info.dtype = GridDtype::f64;
  else if (dtype == "c128") info.dtype = GridDtype::c128;
  else if (dtype == "u8-mask") info.dtype = GridDtype::u8_mask;
  else throw IoError("grid sidecar " + sidecar + ": unknown dtype '" + dtype + "'");
  info.unit = j.value("unit", "");
  info.notes = j.value("notes", "");
  return info;
}

void write_real_grid(const std::string& path, const RealImage& img, const std::string& unit,
                     const std::string& notes) {
  std::vector<double> buf(static_cast<std::size_t>(img.size()));
  std::size_t k = 0;
  for (Index iy = 0; iy < img.rows(); ++iy)
    for (Index ix = 0; ix < img.cols(); ++ix) buf[k++] = img(iy, ix);
  write_payload(path, reinterpret_cast<const char*>(buf.data()), buf.size() * sizeof(double));
  write_sidecar(path, GridInfo{img.rows(), img.cols(), GridDtype::f64, unit, notes});
}

void write_complex_grid(const std::string& path, const ComplexField& img, const std::string& unit,
                        const std::string& notes) {
  std::vector<double> buf(2 * static_cast<std::size_t>(img.size()));
  std::size_t k = 0;
  for (Index iy = 0; iy < img.rows(); ++iy) {
    for (Index ix = 0; ix < img.cols(); ++ix) {
      buf[k++] = img(iy, ix).real();
      buf[k++] = img(iy, ix).imag();
    }
  }
  write_payload(path, reinterpret_cast<const char*>(buf.data()), buf.size() * sizeof(double));
  write_sidecar(path, GridInfo{img.rows(), img.cols(), GridDtype::c128, unit, notes});
}

void write_mask_grid(const std::string& path, const MaskImage& img, const std::string& notes) {
  if ((img > 1).any())
    throw std::invalid_argument("mask grids hold 0/1 values only");
  std::vector<char> buf(static_cast<std::size_t>(img.size()));
  std::size_t k = 0;
  for (Index iy = 0; iy < img.rows(); ++iy)
    for (Index ix = 0; ix < img.cols(); ++ix) buf[k++] = static_cast<char>(img(iy, ix));
  write_payload(path, buf.data(), buf.size());
  write_sidecar(path, GridInfo{img.rows(), img.cols(), GridDtype::u8_mask, "mask", notes});
}

RealImage read_real_grid(const std::string& path) {
  const GridInfo info = read_grid_info(path);
  if (info.dtype != GridDtype::f64)
    throw IoError("grid " + path + ": expected dtype f64, sidecar says " + dtype_name(info.dtype));
  const auto bytes = read_payload(path, static_cast<std::size_t>(info.ny * info.nx) * 8);
  const double* values = reinterpret_cast<const double*>(bytes.data());
  RealImage img(info.ny, info.nx);
  std::size_t k = 0;
  for (Index iy = 0; iy < info.ny; ++iy)
    for (Index ix = 0; ix < info.nx; ++ix) img(iy, ix) = values[k++];
  return img;
}

ComplexField read_complex_grid(const std::string& path) {
  const GridInfo info = read_grid_info(path);
  if (info.dtype != GridDtype::c128)
    throw IoError("grid " + path + ": expected dtype c128, sidecar says " + dtype_name(info.dtype));
  const auto bytes = read_payload(path, static_cast<std::size_t>(info.ny * info.nx) * 16);
  const double* values = reinterpret_cast<const double*>(bytes.data());
  ComplexField img(info.ny, info.nx);
  std::size_t k = 0;
  for (Index iy = 0; iy < info.ny; ++iy) {
    for (Index ix = 0; ix < info.nx; ++ix) {
      img(iy, ix) = Complex(values[k], values[k + 1]);
      k += 2;
    }
  }
  return img;
}

MaskImage read_mask_grid(const std::string& path) {
  const GridInfo info = read_grid_info(path);
  if (info.dtype != GridDtype::u8_mask)
    throw IoError("grid " + path + ": expected dtype u8-mask, sidecar says " +
                  dtype_name(info.dtype));
  const auto bytes = read_payload(path, static_cast<std::size_t>(info.ny * info.nx));
  MaskImage img(info.ny, info.nx);
  std::size_t k = 0;
  for (Index iy = 0; iy < info.ny; ++iy) {
    for (Index ix = 0; ix < info.nx; ++ix) {
      const unsigned char v = static_cast<unsigned char>(bytes[k++]);
      if (v > 1)
        throw IoError("grid " + path + ": mask values must be 0 or 1, found " + std::to_string(v));
      img(iy, ix) = v;
    }
  }
  return img;
}

// ---------------------------------------------------------------------------
// Trace CSV

std::string serialize_trace_csv(const ConvergenceTrace& trace) {
  std::string out =
      "iteration,objective,primal_residual,dual_residual,gradient_residual,stepsize,backtracks,"
      "elapsed_s\n";
  char line[320];
  for (const TraceRow& r : trace.rows) {
    std::snprintf(line, sizeof line, "%d,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%.17g\n", r.iteration,
                  r.objective, r.primal_residual, r.dual_residual, r.gradient_residual, r.stepsize,
                  r.backtracks, r.elapsed_s);
    out += line;
  }
  return out;
}

void write_trace_csv(const std::string& path, const ConvergenceTrace& trace) {
  write_text_file(path, serialize_trace_csv(trace));
}

// ---------------------------------------------------------------------------
// Configuration parsing

namespace {

struct Diagnostics {
  std::vector<std::string> errs;

  void fail(const std::string& path, const std::string& msg) { errs.push_back(path + ": " + msg); }
  void finish() const {
    if (!errs.empty()) throw ConfigError(errs);
  }
};

void check_keys(const json& j, const std::string& path, const std::set<std::string>& allowed,
                Diagnostics& diag) {
  for (const auto& item : j.items())
    if (!allowed.count(item.key())) diag.fail(path + item.key(), "unknown field");
}

const json* get_object(const json& j, const char* key, const std::string& path, Diagnostics& diag) {
  if (!j.contains(key)) return nullptr;
  if (!j.at(key).is_object()) {
    diag.fail(path + key, "expected an object");
    return nullptr;
  }
  return &j.at(key);
}

double get_number(const json& j, const char* key, double def, const std::string& path,
                  Diagnostics& diag) {
  if (!j.contains(key)) return def;
  if (!j.at(key).is_number()) {
    diag.fail(path + key, "expected a number");
    return def;
  }
  return j.at(key).get<double>();
}

int get_int(const json& j, const char* key, int def, const std::string& path, Diagnostics& diag) {
  if (!j.contains(key)) return def;
  if (!j.at(key).is_number_integer()) {
    diag.fail(path + key, "expected an integer");
    return def;
  }
  return j.at(key).get<int>();
}

bool get_bool(const json& j, const char* key, bool def, const std::string& path,
              Diagnostics& diag) {
  if (!j.contains(key)) return def;
  if (!j.at(key).is_boolean()) {
    diag.fail(path + key, "expected a boolean");
    return def;
  }
  return j.at(key).get<bool>();
}

std::string get_string(const json& j, const char* key, const std::string& def,
                       const std::string& path, Diagnostics& diag) {
  if (!j.contains(key)) return def;
  if (!j.at(key).is_string()) {
    diag.fail(path + key, "expected a string");
    return def;
  }
  return j.at(key).get<std::string>();
}

std::uint64_t get_seed(const json& j, const char* key, std::uint64_t def, const std::string& path,
                       Diagnostics& diag) {
  if (!j.contains(key)) return def;
  const json& v = j.at(key);
  if (!v.is_number_integer() || (!v.is_number_unsigned() && v.get<long long>() < 0)) {
    diag.fail(path + key, "expected a non-negative integer");
    return def;
  }
  return v.get<std::uint64_t>();
}

std::vector<double> get_number_list(const json& j, const char* key, const std::string& path,
                                    Diagnostics& diag) {
  std::vector<double> out;
  if (!j.contains(key)) return out;
  if (!j.at(key).is_array()) {
    diag.fail(path + key, "expected an array");
    return out;
  }
  std::size_t i = 0;
  for (const auto& v : j.at(key)) {
    if (!v.is_number()) diag.fail(path + key + "[" + std::to_string(i) + "]", "expected a number");
    else out.push_back(v.get<double>());
    ++i;
  }
  return out;
}

void parse_fresnel_numbers(const json& j, const std::string& path, std::vector<double>& out,
                           Diagnostics& diag) {
  out = get_number_list(j, "fresnel_numbers", path, diag);
  if (out.empty()) diag.fail(path + "fresnel_numbers", "at least one value required");
  for (std::size_t i = 0; i < out.size(); ++i)
    if (!(out[i] > 0.0) || !std::isfinite(out[i]))
      diag.fail(path + "fresnel_numbers[" + std::to_string(i) + "]", "must be positive and finite");
}

double parse_coupling(const json& j, const std::string& path, Diagnostics& diag) {
  double c = 0.0;
  if (const json* coupling = get_object(j, "coupling", path, diag)) {
    check_keys(*coupling, path + "coupling.", {"c_beta_delta"}, diag);
    c = get_number(*coupling, "c_beta_delta", 0.0, path + "coupling.", diag);
    if (!(c >= 0.0) || !std::isfinite(c))
      diag.fail(path + "coupling.c_beta_delta", "must be finite and >= 0");
  }
  return c;
}

Padding parse_padding(const json& j, const std::string& path, Diagnostics& diag) {
  Padding padding;
  const json* p = get_object(j, "padding", path, diag);
  if (!p) return padding;
  check_keys(*p, path + "padding.", {"factor", "mode", "constant_value"}, diag);
  padding.factor = get_number(*p, "factor", padding.factor, path + "padding.", diag);
  if (!(padding.factor >= 1.0) || !std::isfinite(padding.factor)) {
    diag.fail(path + "padding.factor", "must be finite and >= 1");
    padding.factor = 1.0;
  }
  const std::string mode = get_string(*p, "mode", "replicate", path + "padding.", diag);
  if (mode == "replicate") padding.mode = PadMode::Replicate;
  else if (mode == "constant") padding.mode = PadMode::Constant;
  else diag.fail(path + "padding.mode", "must be 'replicate' or 'constant'");
  padding.constant_value = get_number(*p, "constant_value", 0.0, path + "padding.", diag);
  if (!std::isfinite(padding.constant_value))
    diag.fail(path + "padding.constant_value", "must be finite");
  return padding;
}

CctfOptions parse_cctf(const json& j, const std::string& path, Diagnostics& diag) {
  CctfOptions o;
  const json* p = get_object(j, "cctf", path, diag);
  if (!p) return o;
  check_keys(*p, path + "cctf.", {"rho", "tolerance", "max_iterations", "accelerate", "variant"},
             diag);
  o.rho = get_number(*p, "rho", o.rho, path + "cctf.", diag);
  if (!(o.rho > 0.0) || !std::isfinite(o.rho)) diag.fail(path + "cctf.rho", "must be positive");
  o.tolerance = get_number(*p, "tolerance", o.tolerance, path + "cctf.", diag);
  if (!(o.tolerance > 0.0)) diag.fail(path + "cctf.tolerance", "must be positive");
  o.max_iterations = get_int(*p, "max_iterations", o.max_iterations, path + "cctf.", diag);
  if (o.max_iterations < 1) diag.fail(path + "cctf.max_iterations", "must be >= 1");
  o.accelerate = get_bool(*p, "accelerate", o.accelerate, path + "cctf.", diag);
  const std::string variant = get_string(*p, "variant", "direct", path + "cctf.", diag);
  if (variant == "direct") o.variant = AdmmVariant::Direct;
  else if (variant == "scaled-dual") o.variant = AdmmVariant::ScaledDual;
  else diag.fail(path + "cctf.variant", "must be 'direct' or 'scaled-dual'");
  return o;
}

NltikhOptions parse_nltikh(const json& j, const std::string& path, Diagnostics& diag) {
  NltikhOptions o;
  const json* p = get_object(j, "nltikh", path, diag);
  if (!p) return o;
  check_keys(*p, path + "nltikh.",
             {"max_iterations", "gradient_tolerance", "linesearch_window", "backtrack_factor",
              "sufficient_decrease", "max_backtracks", "warm_start", "fixed_iterations",
              "stepsize"},
             diag);
  o.max_iterations = get_int(*p, "max_iterations", o.max_iterations, path + "nltikh.", diag);
  if (o.max_iterations < 1) diag.fail(path + "nltikh.max_iterations", "must be >= 1");
  o.gradient_tolerance =
      get_number(*p, "gradient_tolerance", o.gradient_tolerance, path + "nltikh.", diag);
  if (!(o.gradient_tolerance > 0.0))
    diag.fail(path + "nltikh.gradient_tolerance", "must be positive");
  o.linesearch_window = get_int(*p, "linesearch_window", o.linesearch_window, path + "nltikh.", diag);
  if (o.linesearch_window < 1) diag.fail(path + "nltikh.linesearch_window", "must be >= 1");
  o.backtrack_factor =
      get_number(*p, "backtrack_factor", o.backtrack_factor, path + "nltikh.", diag);
  if (!(o.backtrack_factor > 0.0 && o.backtrack_factor < 1.0))
    diag.fail(path + "nltikh.backtrack_factor", "must lie in (0, 1)");
  o.sufficient_decrease =
      get_number(*p, "sufficient_decrease", o.sufficient_decrease, path + "nltikh.", diag);
  if (!(o.sufficient_decrease >= 0.0))
    diag.fail(path + "nltikh.sufficient_decrease", "must be >= 0");
  o.max_backtracks = get_int(*p, "max_backtracks", o.max_backtracks, path + "nltikh.", diag);
  if (o.max_backtracks < 0) diag.fail(path + "nltikh.max_backtracks", "must be >= 0");
  o.warm_start = get_bool(*p, "warm_start", o.warm_start, path + "nltikh.", diag);
  o.fixed_iterations = get_int(*p, "fixed_iterations", o.fixed_iterations, path + "nltikh.", diag);
  if (o.fixed_iterations < 0) diag.fail(path + "nltikh.fixed_iterations", "must be >= 0");
  if (const json* s = get_object(*p, "stepsize", path + "nltikh.", diag)) {
    check_keys(*s, path + "nltikh.stepsize.", {"policy", "value"}, diag);
    const std::string policy = get_string(*s, "policy", "bb", path + "nltikh.stepsize.", diag);
    if (policy == "bb") o.stepsize.kind = StepsizeKind::BarzilaiBorwein;
    else if (policy == "constant") o.stepsize.kind = StepsizeKind::Constant;
    else diag.fail(path + "nltikh.stepsize.policy", "must be 'bb' or 'constant'");
    o.stepsize.constant_value = get_number(*s, "value", 0.0, path + "nltikh.stepsize.", diag);
    if (o.stepsize.kind == StepsizeKind::Constant &&
        (!(o.stepsize.constant_value > 0.0) || !std::isfinite(o.stepsize.constant_value)))
      diag.fail(path + "nltikh.stepsize.value", "must be positive for the constant policy");
  }
  return o;
}

json padding_json(const Padding& padding) {
  return {{"factor", padding.factor},
          {"mode", padding.mode == PadMode::Replicate ? "replicate" : "constant"},
          {"constant_value", padding.constant_value}};
}

json cctf_json(const CctfOptions& o) {
  return {{"rho", o.rho},
          {"tolerance", o.tolerance},
          {"max_iterations", o.max_iterations},
          {"accelerate", o.accelerate},
          {"variant", o.variant == AdmmVariant::Direct ? "direct" : "scaled-dual"}};
}

json nltikh_json(const NltikhOptions& o) {
  return {{"max_iterations", o.max_iterations},
          {"gradient_tolerance", o.gradient_tolerance},
          {"linesearch_window", o.linesearch_window},
          {"backtrack_factor", o.backtrack_factor},
          {"sufficient_decrease", o.sufficient_decrease},
          {"max_backtracks", o.max_backtracks},
          {"warm_start", o.warm_start},
          {"fixed_iterations", o.fixed_iterations},
          {"stepsize",
           {{"policy", o.stepsize.kind == StepsizeKind::BarzilaiBorwein ? "bb" : "constant"},
            {"value", o.stepsize.constant_value}}}};
}

}  // namespace

ReconstructionConfig parse_reconstruction_config(const json& j) {
  Diagnostics diag;
  ReconstructionConfig c;
  if (!j.is_object()) {
    diag.fail("config", "expected a JSON object");
    diag.finish();
  }
  check_keys(j, "",
             {"method", "holograms", "fresnel_numbers", "coupling", "regularization", "constraints",
              "cctf", "nltikh", "padding", "output", "seed"},
             diag);

  c.method = get_string(j, "method", c.method, "", diag);
  if (c.method != "ctf" && c.method != "cctf" && c.method != "nltikh")
    diag.fail("method", "must be one of ctf, cctf, nltikh");

  if (!j.contains("holograms") || !j.at("holograms").is_array() || j.at("holograms").empty()) {
    diag.fail("holograms", "expected a non-empty array of file paths");
  } else {
    std::size_t i = 0;
    for (const auto& v : j.at("holograms")) {
      if (!v.is_string() || v.get<std::string>().empty())
        diag.fail("holograms[" + std::to_string(i) + "]", "expected a file path");
      else c.hologram_paths.push_back(v.get<std::string>());
      ++i;
    }
  }
  parse_fresnel_numbers(j, "", c.fresnel_numbers, diag);
  if (!c.hologram_paths.empty() && !c.fresnel_numbers.empty() &&
      c.hologram_paths.size() != c.fresnel_numbers.size())
    diag.fail("fresnel_numbers", "count must match the hologram list");

  c.c_beta_delta = parse_coupling(j, "", diag);

  if (const json* r = get_object(j, "regularization", "", diag)) {
    check_keys(*r, "regularization.",
               {"alpha_low", "alpha_high", "alpha_beyond_na", "transition_width",
                "detector_aspect"},
               diag);
    c.alpha_low = get_number(*r, "alpha_low", c.alpha_low, "regularization.", diag);
    c.alpha_high = get_number(*r, "alpha_high", c.alpha_high, "regularization.", diag);
    if (!(c.alpha_low >= 0.0)) diag.fail("regularization.alpha_low", "must be >= 0");
    if (!(c.alpha_high >= 0.0)) diag.fail("regularization.alpha_high", "must be >= 0");
    c.transition_width =
        get_number(*r, "transition_width", c.transition_width, "regularization.", diag);
    if (!(c.transition_width > 0.0)) diag.fail("regularization.transition_width", "must be positive");
    if (r->contains("alpha_beyond_na")) {
      c.three_level = true;
      const auto& v = r->at("alpha_beyond_na");
      if (v.is_string() && v.get<std::string>() == "auto") c.alpha_beyond_na = 0.0;
      else if (v.is_number() && v.get<double>() >= 0.0) c.alpha_beyond_na = v.get<double>();
      else diag.fail("regularization.alpha_beyond_na", "must be a number >= 0 or 'auto'");
    }
    c.detector_aspect = get_number(*r, "detector_aspect", 0.0, "regularization.", diag);
    if (c.detector_aspect != 0.0 && !(c.detector_aspect >= 2.0))
      diag.fail("regularization.detector_aspect", "must be >= 2 when given");
  }

  if (const json* a = get_object(j, "constraints", "", diag)) {
    check_keys(*a, "constraints.", {"negativity", "support_mask", "box"}, diag);
    c.negativity = get_bool(*a, "negativity", false, "constraints.", diag);
    c.support_mask_path = get_string(*a, "support_mask", "", "constraints.", diag);
    if (a->contains("box")) {
      const auto& b = a->at("box");
      if (!b.is_array() || b.size() != 2 || !b[0].is_number() || !b[1].is_number()) {
        diag.fail("constraints.box", "expected [lo, hi] numbers");
      } else {
        c.has_box = true;
        c.box_lo = b[0].get<double>();
        c.box_hi = b[1].get<double>();
        if (!(c.box_lo <= 0.0 && 0.0 <= c.box_hi))
          diag.fail("constraints.box", "must satisfy lo <= 0 <= hi");
      }
    }
  }

  c.cctf = parse_cctf(j, "", diag);
  c.nltikh = parse_nltikh(j, "", diag);
  c.padding = parse_padding(j, "", diag);

  if (const json* o = get_object(j, "output", "", diag)) {
    check_keys(*o, "output.", {"phase", "trace", "summary"}, diag);
    c.output_phase = get_string(*o, "phase", "", "output.", diag);
    c.output_trace = get_string(*o, "trace", "", "output.", diag);
    c.output_summary = get_string(*o, "summary", "", "output.", diag);
  }
  if (c.output_phase.empty()) diag.fail("output.phase", "required");

  c.seed = get_seed(j, "seed", 0, "", diag);
  c.nltikh.seed = c.seed;

  const bool any_constraint = c.negativity || !c.support_mask_path.empty() || c.has_box;
  if (c.method == "cctf" && !any_constraint)
    diag.fail("constraints", "method cctf requires at least one constraint");
  if (c.method == "ctf" && any_constraint)
    diag.fail("constraints", "method ctf cannot apply constraints; use cctf or nltikh");

  diag.finish();
  return c;
}

SimulateConfig parse_simulate_config(const json& j) {
  // A manifest written by an earlier run nests the resolved config; accept
  // both forms so a manifest can reproduce its own outputs.
  if (j.is_object() && j.contains("config") && j.at("config").is_object())
    return parse_simulate_config(j.at("config"));

  Diagnostics diag;
  SimulateConfig c;
  if (!j.is_object()) {
    diag.fail("config", "expected a JSON object");
    diag.finish();
  }
  check_keys(j, "", {"grid", "phantom", "coupling", "fresnel_numbers", "noise", "padding", "output"},
             diag);

  if (const json* g = get_object(j, "grid", "", diag)) {
    check_keys(*g, "grid.", {"ny", "nx"}, diag);
    c.ny = get_int(*g, "ny", 0, "grid.", diag);
    c.nx = get_int(*g, "nx", 0, "grid.", diag);
  }
  if (c.ny < 1) diag.fail("grid.ny", "must be >= 1");
  if (c.nx < 1) diag.fail("grid.nx", "must be >= 1");

  if (const json* p = get_object(j, "phantom", "", diag)) {
    check_keys(*p, "phantom.", {"spheres", "wavenumber", "delta", "peak_phase", "supersample"},
               diag);
    if (!p->contains("spheres") || !p->at("spheres").is_array() || p->at("spheres").empty()) {
      diag.fail("phantom.spheres", "expected a non-empty array");
    } else {
      std::size_t i = 0;
      for (const auto& s : p->at("spheres")) {
        const std::string path = "phantom.spheres[" + std::to_string(i) + "].";
        Sphere sphere;
        if (!s.is_object()) {
          diag.fail("phantom.spheres[" + std::to_string(i) + "]", "expected an object");
        } else {
          check_keys(s, path, {"center_y", "center_x", "radius"}, diag);
          sphere.center_y = get_number(s, "center_y", 0.0, path, diag);
          sphere.center_x = get_number(s, "center_x", 0.0, path, diag);
          sphere.radius = get_number(s, "radius", 0.0, path, diag);
          if (!(sphere.radius > 0.0)) diag.fail(path + "radius", "must be positive");
        }
        c.phantom.spheres.push_back(sphere);
        ++i;
      }
    }
    c.phantom.wavenumber = get_number(*p, "wavenumber", 0.0, "phantom.", diag);
    c.phantom.delta = get_number(*p, "delta", 0.0, "phantom.", diag);
    if (p->contains("peak_phase")) {
      const double peak = get_number(*p, "peak_phase", 0.0, "phantom.", diag);
      if (!(peak <= 0.0)) diag.fail("phantom.peak_phase", "must be <= 0");
      c.phantom.peak_phase = peak;
    }
    c.phantom.supersample = get_bool(*p, "supersample", false, "phantom.", diag);
    if (!c.phantom.peak_phase && !(c.phantom.wavenumber > 0.0 && c.phantom.delta > 0.0))
      diag.fail("phantom", "either peak_phase or positive wavenumber and delta required");
  } else {
    diag.fail("phantom", "required");
  }

  c.c_beta_delta = parse_coupling(j, "", diag);
  parse_fresnel_numbers(j, "", c.fresnel_numbers, diag);

  if (const json* n = get_object(j, "noise", "", diag)) {
    check_keys(*n, "noise.",
               {"photon_count", "gaussian_sigma", "drift_amplitude", "drift_correlation_length",
                "seed"},
               diag);
    c.noise.photon_count = get_number(*n, "photon_count", 0.0, "noise.", diag);
    if (!(c.noise.photon_count >= 0.0)) diag.fail("noise.photon_count", "must be >= 0");
    c.noise.gaussian_sigma = get_number(*n, "gaussian_sigma", 0.0, "noise.", diag);
    if (!(c.noise.gaussian_sigma >= 0.0)) diag.fail("noise.gaussian_sigma", "must be >= 0");
    c.noise.drift_amplitude = get_number(*n, "drift_amplitude", 0.0, "noise.", diag);
    if (!(c.noise.drift_amplitude >= 0.0 && c.noise.drift_amplitude < 0.5))
      diag.fail("noise.drift_amplitude", "must lie in [0, 0.5)");
    c.noise.drift_correlation_length =
        get_number(*n, "drift_correlation_length", 8.0, "noise.", diag);
    if (!(c.noise.drift_correlation_length >= 1.0))
      diag.fail("noise.drift_correlation_length", "must be >= 1");
    c.noise.seed = get_seed(*n, "seed", 0, "noise.", diag);
  }

  c.padding = parse_padding(j, "", diag);

  if (const json* o = get_object(j, "output", "", diag)) {
    check_keys(*o, "output.", {"directory", "prefix"}, diag);
    c.output_directory = get_string(*o, "directory", c.output_directory, "output.", diag);
    c.prefix = get_string(*o, "prefix", c.prefix, "output.", diag);
  }

  diag.finish();
  return c;
}

BenchmarkConfig parse_benchmark_config(const json& j) {
  Diagnostics diag;
  BenchmarkConfig c;
  if (!j.is_object()) {
    diag.fail("config", "expected a JSON object");
    diag.finish();
  }
  check_keys(j, "", {"scenarios"}, diag);
  if (!j.contains("scenarios") || !j.at("scenarios").is_array()) {
    diag.fail("scenarios", "expected an array");
    diag.finish();
  }
  std::size_t i = 0;
  for (const auto& s : j.at("scenarios")) {
    const std::string path = "scenarios[" + std::to_string(i) + "].";
    BenchmarkScenario scenario;
    if (!s.is_object()) {
      diag.fail("scenarios[" + std::to_string(i) + "]", "expected an object");
      ++i;
      continue;
    }
    check_keys(s, path,
               {"name", "manifest", "methods", "constant_stepsizes", "reference_iterations",
                "regularization", "constraints", "cctf", "nltikh", "padding"},
               diag);
    scenario.name = get_string(s, "name", "", path, diag);
    if (scenario.name.empty()) diag.fail(path + "name", "required");
    scenario.manifest_path = get_string(s, "manifest", "", path, diag);
    if (scenario.manifest_path.empty()) diag.fail(path + "manifest", "required");
    if (!s.contains("methods") || !s.at("methods").is_array() || s.at("methods").empty()) {
      diag.fail(path + "methods", "expected a non-empty array");
    } else {
      std::size_t m = 0;
      for (const auto& v : s.at("methods")) {
        const std::string name = v.is_string() ? v.get<std::string>() : "";
        if (name != "ctf" && name != "cctf" && name != "nltikh" && name != "nltikh-cold" &&
            name != "nltikh-constant")
          diag.fail(path + "methods[" + std::to_string(m) + "]",
                    "must be one of ctf, cctf, nltikh, nltikh-cold, nltikh-constant");
        else scenario.methods.push_back(name);
        ++m;
      }
    }
    scenario.constant_stepsizes = get_number_list(s, "constant_stepsizes", path, diag);
    for (std::size_t k = 0; k < scenario.constant_stepsizes.size(); ++k)
      if (!(scenario.constant_stepsizes[k] > 0.0))
        diag.fail(path + "constant_stepsizes[" + std::to_string(k) + "]", "must be positive");
    const bool wants_constant =
        std::count(scenario.methods.begin(), scenario.methods.end(), "nltikh-constant") > 0;
    if (wants_constant && scenario.constant_stepsizes.empty())
      diag.fail(path + "constant_stepsizes", "required for method nltikh-constant");
    scenario.reference_iterations =
        get_int(s, "reference_iterations", scenario.reference_iterations, path, diag);
    if (scenario.reference_iterations < 1)
      diag.fail(path + "reference_iterations", "must be >= 1");
    if (const json* r = get_object(s, "regularization", path, diag)) {
      check_keys(*r, path + "regularization.", {"alpha_low", "alpha_high", "transition_width"},
                 diag);
      scenario.alpha_low = get_number(*r, "alpha_low", scenario.alpha_low, path + "regularization.", diag);
      scenario.alpha_high =
          get_number(*r, "alpha_high", scenario.alpha_high, path + "regularization.", diag);
      scenario.transition_width = get_number(*r, "transition_width", scenario.transition_width,
                                             path + "regularization.", diag);
      if (!(scenario.alpha_low >= 0.0)) diag.fail(path + "regularization.alpha_low", "must be >= 0");
      if (!(scenario.alpha_high >= 0.0))
        diag.fail(path + "regularization.alpha_high", "must be >= 0");
      if (!(scenario.transition_width > 0.0))
        diag.fail(path + "regularization.transition_width", "must be positive");
    }
    if (const json* a = get_object(s, "constraints", path, diag)) {
      check_keys(*a, path + "constraints.", {"negativity"}, diag);
      scenario.negativity = get_bool(*a, "negativity", false, path + "constraints.", diag);
    }
    scenario.cctf = parse_cctf(s, path, diag);
    scenario.nltikh = parse_nltikh(s, path, diag);
    scenario.padding = parse_padding(s, path, diag);
    const bool wants_cctf = std::count(scenario.methods.begin(), scenario.methods.end(), "cctf") > 0;
    if (wants_cctf && !scenario.negativity)
      diag.fail(path + "constraints.negativity", "required for method cctf");
    c.scenarios.push_back(std::move(scenario));
    ++i;
  }
  diag.finish();
  return c;
}

nlohmann::json reconstruction_config_json(const ReconstructionConfig& c) {
  json reg = {{"alpha_low", c.alpha_low},
              {"alpha_high", c.alpha_high},
              {"transition_width", c.transition_width}};
  if (c.three_level) {
    if (c.alpha_beyond_na > 0.0) reg["alpha_beyond_na"] = c.alpha_beyond_na;
    else reg["alpha_beyond_na"] = "auto";
  }
  if (c.detector_aspect > 0.0) reg["detector_aspect"] = c.detector_aspect;
  json constraints = {{"negativity", c.negativity}};
  if (!c.support_mask_path.empty()) constraints["support_mask"] = c.support_mask_path;
  if (c.has_box) constraints["box"] = {c.box_lo, c.box_hi};
  return {{"method", c.method},
          {"holograms", c.hologram_paths},
          {"fresnel_numbers", c.fresnel_numbers},
          {"coupling", {{"c_beta_delta", c.c_beta_delta}}},
          {"regularization", reg},
          {"constraints", constraints},
          {"cctf", cctf_json(c.cctf)},
          {"nltikh", nltikh_json(c.nltikh)},
          {"padding", padding_json(c.padding)},
          {"output",
           {{"phase", c.output_phase}, {"trace", c.output_trace}, {"summary", c.output_summary}}},
          {"seed", c.seed}};
}

nlohmann::json simulate_config_json(const SimulateConfig& c) {
  json spheres = json::array();
  for (const Sphere& s : c.phantom.spheres)
    spheres.push_back(
        {{"center_y", s.center_y}, {"center_x", s.center_x}, {"radius", s.radius}});
  json phantom = {{"spheres", spheres}, {"supersample", c.phantom.supersample}};
  if (c.phantom.peak_phase) phantom["peak_phase"] = *c.phantom.peak_phase;
  else {
    phantom["wavenumber"] = c.phantom.wavenumber;
    phantom["delta"] = c.phantom.delta;
  }
  return {{"grid", {{"ny", c.ny}, {"nx", c.nx}}},
          {"phantom", phantom},
          {"coupling", {{"c_beta_delta", c.c_beta_delta}}},
          {"fresnel_numbers", c.fresnel_numbers},
          {"noise",
           {{"photon_count", c.noise.photon_count},
            {"gaussian_sigma", c.noise.gaussian_sigma},
            {"drift_amplitude", c.noise.drift_amplitude},
            {"drift_correlation_length", c.noise.drift_correlation_length},
            {"seed", c.noise.seed}}},
          {"padding", padding_json(c.padding)},
          {"output", {{"directory", c.output_directory}, {"prefix", c.prefix}}}};
}

nlohmann::json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open file: " + path);
  try {
    json j;
    in >> j;
    return j;
  } catch (const json::exception& e) {
    throw ConfigError({path + ": malformed JSON (" + e.what() + ")"});
  }
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write file: " + path);
  out << text;
  if (!out) throw IoError("failed writing file: " + path);
}

}  // namespace nfh
