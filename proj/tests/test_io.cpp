#include <doctest.h>

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <sstream>

#include "nfh/io.hpp"
#include "test_helpers.hpp"

using namespace nfh;
using nlohmann::json;
using test::random_image;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  return std::string(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

// Runs a parser expected to fail and asserts that every listed field name
// appears in its own diagnostic line.
void expect_config_error(const std::function<void()>& fn,
                         const std::vector<std::string>& fields) {
  try {
    fn();
    FAIL("expected ConfigError");
  } catch (const ConfigError& e) {
    for (const std::string& field : fields) {
      bool found = false;
      for (const std::string& detail : e.details())
        if (detail.find(field) != std::string::npos) found = true;
      INFO("missing diagnostic for: ", field, "\nactual: ", e.what());
      CHECK(found);
    }
  }
}

json minimal_reconstruction_config() {
  return json{{"holograms", {"a.grid", "b.grid"}},
              {"fresnel_numbers", {1.59e-3, 2.47e-3}},
              {"output", {{"phase", "out.grid"}}}};
}

}  // namespace

TEST_CASE("real grids survive a write/read round trip bit-exactly") {
  const auto dir = test::scratch_dir("io-real");
  const std::string path = (dir / "img.grid").string();
  const RealImage img = random_image(5, 7, 70);
  write_real_grid(path, img, "rad", "test image");
  const RealImage back = read_real_grid(path);
  CHECK((back - img).abs().maxCoeff() == 0.0);

  // Payload is raw row-major f64: 5*7*8 bytes, no header.
  CHECK(slurp(path).size() == 5 * 7 * 8);
  const json sidecar = json::parse(slurp(path + ".json"));
  CHECK(sidecar["shape"] == json({5, 7}));
  CHECK(sidecar["dtype"] == "f64");
  CHECK(sidecar["unit"] == "rad");
  CHECK(sidecar["notes"] == "test image");

  const GridInfo info = read_grid_info(path);
  CHECK(info.ny == 5);
  CHECK(info.nx == 7);
  CHECK(info.dtype == GridDtype::f64);
}

TEST_CASE("complex grids survive a round trip with interleaved components") {
  const auto dir = test::scratch_dir("io-complex");
  const std::string path = (dir / "field.grid").string();
  ComplexField field(2, 3);
  field << Complex(1, -2), Complex(0.5, 0), Complex(-1e300, 1e-300),
      Complex(3, 4), Complex(0, 0), Complex(-0.0, 7);
  write_complex_grid(path, field, "1");
  const ComplexField back = read_complex_grid(path);
  CHECK((back - field).abs().maxCoeff() == 0.0);
  CHECK(slurp(path).size() == 2 * 3 * 16);
  CHECK(read_grid_info(path).dtype == GridDtype::c128);
}

TEST_CASE("mask grids round trip and enforce 0/1 values") {
  const auto dir = test::scratch_dir("io-mask");
  const std::string path = (dir / "mask.grid").string();
  MaskImage mask(2, 2);
  mask << 1, 0, 0, 1;
  write_mask_grid(path, mask);
  CHECK((read_mask_grid(path) == mask).all());
  CHECK(slurp(path).size() == 4);

  // Corrupt one byte: the reader must reject non-binary masks.
  std::string bytes = slurp(path);
  bytes[1] = 7;
  std::ofstream(path, std::ios::binary | std::ios::trunc) << bytes;
  CHECK_THROWS_AS(read_mask_grid(path), IoError);

  MaskImage bad(1, 2);
  bad << 1, 3;
  CHECK_THROWS_AS(write_mask_grid((dir / "bad.grid").string(), bad), std::invalid_argument);
}

TEST_CASE("grid readers reject missing or inconsistent files") {
  const auto dir = test::scratch_dir("io-errors");
  const std::string path = (dir / "img.grid").string();
  CHECK_THROWS_AS(read_real_grid(path), IoError);  // nothing written yet

  write_real_grid(path, RealImage::Zero(4, 4), "rad");
  // dtype mismatch between reader and sidecar
  CHECK_THROWS_AS(read_complex_grid(path), IoError);
  CHECK_THROWS_AS(read_mask_grid(path), IoError);

  // truncated payload
  std::ofstream(path, std::ios::binary | std::ios::trunc) << "short";
  CHECK_THROWS_AS(read_real_grid(path), IoError);

  // malformed sidecar
  std::ofstream(path + ".json", std::ios::trunc) << "{not json";
  CHECK_THROWS_AS(read_grid_info(path), IoError);
  std::remove((path + ".json").c_str());
  CHECK_THROWS_AS(read_grid_info(path), IoError);
}

TEST_CASE("trace serialization emits the fixed header and one row per iteration") {
  ConvergenceTrace trace;
  const std::string header =
      "iteration,objective,primal_residual,dual_residual,gradient_residual,stepsize,backtracks,"
      "elapsed_s\n";
  CHECK(serialize_trace_csv(trace) == header);

  TraceRow row;
  row.iteration = 1;
  trace.rows.push_back(row);
  row.iteration = 2;
  trace.rows.push_back(row);
  const std::string csv = serialize_trace_csv(trace);
  CHECK(csv.substr(0, header.size()) == header);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 3);  // header + 2 rows
}

TEST_CASE("trace values round trip through the text form bit-exactly") {
  ConvergenceTrace trace;
  for (int k = 1; k <= 3; ++k) {
    TraceRow row;
    row.iteration = k;
    row.objective = 0.1 * k + 1e-17;
    row.primal_residual = 1.0 / 3.0 / k;
    row.dual_residual = 2.2250738585072014e-308;  // smallest normal double
    row.gradient_residual = std::numbers::pi * k;
    row.stepsize = 6.0221407599999999e23;
    row.backtracks = k - 1;
    row.elapsed_s = 0.123456789012345678 * k;
    trace.rows.push_back(row);
  }
  const std::string csv = serialize_trace_csv(trace);
  std::istringstream in(csv);
  std::string line;
  std::getline(in, line);  // header
  for (int k = 1; k <= 3; ++k) {
    REQUIRE(std::getline(in, line));
    const TraceRow& row = trace.rows[static_cast<std::size_t>(k - 1)];
    char* cursor = line.data();
    CHECK(std::strtol(cursor, &cursor, 10) == row.iteration);
    const double cols[6] = {row.objective,          row.primal_residual, row.dual_residual,
                            row.gradient_residual,  row.stepsize,        0.0};
    for (int c = 0; c < 5; ++c) {
      REQUIRE(*cursor == ',');
      ++cursor;
      CHECK(std::strtod(cursor, &cursor) == cols[c]);
    }
    REQUIRE(*cursor == ',');
    ++cursor;
    CHECK(std::strtol(cursor, &cursor, 10) == row.backtracks);
    REQUIRE(*cursor == ',');
    ++cursor;
    CHECK(std::strtod(cursor, &cursor) == row.elapsed_s);
  }
  CHECK_FALSE(std::getline(in, line));  // exactly rows + header
}

TEST_CASE("minimal reconstruction configs parse with documented defaults") {
  const ReconstructionConfig c = parse_reconstruction_config(minimal_reconstruction_config());
  CHECK(c.method == "nltikh");
  CHECK(c.hologram_paths == std::vector<std::string>{"a.grid", "b.grid"});
  CHECK(c.fresnel_numbers == std::vector<double>{1.59e-3, 2.47e-3});
  CHECK(c.c_beta_delta == 0.0);
  CHECK(c.alpha_low == 1e-3);
  CHECK(c.alpha_high == 1e-1);
  CHECK_FALSE(c.three_level);
  CHECK(c.transition_width == 0.1);
  CHECK_FALSE(c.negativity);
  CHECK(c.cctf.rho == 0.1);
  CHECK(c.cctf.tolerance == 1e-3);
  CHECK(c.cctf.max_iterations == 200);
  CHECK(c.cctf.variant == AdmmVariant::Direct);
  CHECK(c.nltikh.max_iterations == 500);
  CHECK(c.nltikh.gradient_tolerance == 1e-3);
  CHECK(c.nltikh.linesearch_window == 10);
  CHECK(c.nltikh.warm_start);
  CHECK(c.nltikh.stepsize.kind == StepsizeKind::BarzilaiBorwein);
  CHECK(c.padding.factor == 2.0);
  CHECK(c.padding.mode == PadMode::Replicate);
  CHECK(c.output_phase == "out.grid");
  CHECK(c.seed == 0);
}

TEST_CASE("every invalid field is reported in one pass") {
  json j = minimal_reconstruction_config();
  j["method"] = "banana";
  j["fresnel_numbers"] = {1.59e-3, -1.0};
  j["coupling"] = {{"c_beta_delta", -0.5}};
  j["regularization"] = {{"alpha_low", -2.0}, {"detector_aspect", 1.2}};
  j["cctf"] = {{"rho", 0.0}, {"variant", "sideways"}};
  j["nltikh"] = {{"backtrack_factor", 1.5}, {"stepsize", {{"policy", "constant"}, {"value", 0.0}}}};
  j["padding"] = {{"factor", 0.25}};
  j["seed"] = -4;
  j["mystery"] = 1;
  expect_config_error([&] { parse_reconstruction_config(j); },
                      {"method", "fresnel_numbers[1]", "coupling.c_beta_delta",
                       "regularization.alpha_low", "regularization.detector_aspect", "cctf.rho",
                       "cctf.variant", "nltikh.backtrack_factor", "nltikh.stepsize.value",
                       "padding.factor", "seed", "mystery"});
}

TEST_CASE("constraint/method combinations are checked") {
  json j = minimal_reconstruction_config();
  j["method"] = "cctf";
  expect_config_error([&] { parse_reconstruction_config(j); }, {"constraints"});

  j = minimal_reconstruction_config();
  j["method"] = "ctf";
  j["constraints"] = {{"negativity", true}};
  expect_config_error([&] { parse_reconstruction_config(j); }, {"constraints"});

  j = minimal_reconstruction_config();
  j["constraints"] = {{"box", {0.5, 2.0}}};
  expect_config_error([&] { parse_reconstruction_config(j); }, {"constraints.box"});

  j = minimal_reconstruction_config();
  j["fresnel_numbers"] = {1.59e-3};  // two holograms, one Fresnel number
  expect_config_error([&] { parse_reconstruction_config(j); }, {"fresnel_numbers"});

  j = minimal_reconstruction_config();
  j.erase("output");
  expect_config_error([&] { parse_reconstruction_config(j); }, {"output.phase"});
}

TEST_CASE("aperture regularization accepts a number or the auto marker") {
  json j = minimal_reconstruction_config();
  j["regularization"] = {{"alpha_beyond_na", "auto"}};
  ReconstructionConfig c = parse_reconstruction_config(j);
  CHECK(c.three_level);
  CHECK(c.alpha_beyond_na == 0.0);

  j["regularization"] = {{"alpha_beyond_na", 2.5}, {"detector_aspect", 512.0}};
  c = parse_reconstruction_config(j);
  CHECK(c.three_level);
  CHECK(c.alpha_beyond_na == 2.5);
  CHECK(c.detector_aspect == 512.0);

  j["regularization"] = {{"alpha_beyond_na", "sometimes"}};
  expect_config_error([&] { parse_reconstruction_config(j); },
                      {"regularization.alpha_beyond_na"});
}

TEST_CASE("the seed propagates into the solver options") {
  json j = minimal_reconstruction_config();
  j["seed"] = 77;
  const ReconstructionConfig c = parse_reconstruction_config(j);
  CHECK(c.seed == 77);
  CHECK(c.nltikh.seed == 77);
}

TEST_CASE("resolved reconstruction configs reparse to the same values") {
  json j = minimal_reconstruction_config();
  j["method"] = "cctf";
  j["constraints"] = {{"negativity", true}, {"box", {-2.0, 0.0}}};
  j["cctf"] = {{"variant", "scaled-dual"}, {"rho", 0.7}};
  j["nltikh"] = {{"stepsize", {{"policy", "constant"}, {"value", 0.25}}}, {"warm_start", false}};
  j["regularization"] = {{"alpha_beyond_na", "auto"}};
  j["seed"] = 9;
  const ReconstructionConfig a = parse_reconstruction_config(j);
  const ReconstructionConfig b = parse_reconstruction_config(reconstruction_config_json(a));
  CHECK(b.method == a.method);
  CHECK(b.cctf.variant == AdmmVariant::ScaledDual);
  CHECK(b.cctf.rho == 0.7);
  CHECK(b.negativity);
  CHECK(b.has_box);
  CHECK(b.box_lo == -2.0);
  CHECK(b.nltikh.stepsize.kind == StepsizeKind::Constant);
  CHECK(b.nltikh.stepsize.constant_value == 0.25);
  CHECK_FALSE(b.nltikh.warm_start);
  CHECK(b.three_level);
  CHECK(b.alpha_beyond_na == 0.0);
  CHECK(b.seed == 9);
  CHECK(reconstruction_config_json(a) == reconstruction_config_json(b));
}

TEST_CASE("simulate configs parse directly and from their manifest form") {
  const json inner = {{"grid", {{"ny", 32}, {"nx", 48}}},
                      {"phantom",
                       {{"spheres", {{{"center_y", 16.0}, {"center_x", 24.0}, {"radius", 8.0}}}},
                        {"peak_phase", -1.5},
                        {"supersample", true}}},
                      {"fresnel_numbers", {1.59e-3}},
                      {"noise", {{"photon_count", 1e4}, {"seed", 3}}},
                      {"output", {{"directory", "/tmp/x"}, {"prefix", "run"}}}};
  const SimulateConfig direct = parse_simulate_config(inner);
  CHECK(direct.ny == 32);
  CHECK(direct.nx == 48);
  CHECK(direct.phantom.spheres.size() == 1);
  CHECK(direct.phantom.peak_phase.value() == -1.5);
  CHECK(direct.phantom.supersample);
  CHECK(direct.noise.photon_count == 1e4);
  CHECK(direct.noise.seed == 3);
  CHECK(direct.output_directory == "/tmp/x");
  CHECK(direct.prefix == "run");

  // A manifest nests the resolved config and may carry extra bookkeeping.
  const json manifest = {{"config", inner}, {"outputs", {{"phase", "x.grid"}}}};
  const SimulateConfig from_manifest = parse_simulate_config(manifest);
  CHECK(simulate_config_json(from_manifest) == simulate_config_json(direct));
}

TEST_CASE("simulate configs report phantom and noise problems by field") {
  json j = {{"grid", {{"ny", 8}, {"nx", 8}}},
            {"phantom", {{"spheres", json::array()}}},
            {"fresnel_numbers", {1e-3}}};
  expect_config_error([&] { parse_simulate_config(j); }, {"phantom.spheres"});

  j["phantom"] = {{"spheres", {{{"center_y", 4.0}, {"center_x", 4.0}, {"radius", -2.0}}}},
                  {"peak_phase", 0.5}};
  expect_config_error([&] { parse_simulate_config(j); },
                      {"phantom.spheres[0].radius", "phantom.peak_phase"});

  j["phantom"] = {{"spheres", {{{"center_y", 4.0}, {"center_x", 4.0}, {"radius", 2.0}}}}};
  expect_config_error([&] { parse_simulate_config(j); }, {"phantom"});

  j["phantom"]["peak_phase"] = -0.5;
  j["noise"] = {{"drift_amplitude", 0.75}, {"drift_correlation_length", 0.1}};
  expect_config_error([&] { parse_simulate_config(j); },
                      {"noise.drift_amplitude", "noise.drift_correlation_length"});

  j["noise"] = {{"photon_count", 100.0}};
  j["grid"] = {{"ny", 0}, {"nx", 8}};
  expect_config_error([&] { parse_simulate_config(j); }, {"grid.ny"});
}

TEST_CASE("benchmark configs validate method lists and their requirements") {
  json scenario = {{"name", "demo"},
                   {"manifest", "m.json"},
                   {"methods", {"ctf", "nltikh", "nltikh-cold"}}};
  json j = {{"scenarios", {scenario}}};
  const BenchmarkConfig c = parse_benchmark_config(j);
  REQUIRE(c.scenarios.size() == 1);
  CHECK(c.scenarios[0].name == "demo");
  CHECK(c.scenarios[0].methods.size() == 3);
  CHECK(c.scenarios[0].reference_iterations == 300);

  scenario["methods"] = {"nltikh-constant"};
  j = {{"scenarios", {scenario}}};
  expect_config_error([&] { parse_benchmark_config(j); }, {"constant_stepsizes"});

  scenario["methods"] = {"cctf"};
  j = {{"scenarios", {scenario}}};
  expect_config_error([&] { parse_benchmark_config(j); }, {"constraints.negativity"});

  scenario["methods"] = {"warp"};
  j = {{"scenarios", {scenario}}};
  expect_config_error([&] { parse_benchmark_config(j); }, {"methods[0]"});

  scenario["methods"] = {"ctf"};
  scenario["reference_iterations"] = 0;
  j = {{"scenarios", {scenario}}};
  expect_config_error([&] { parse_benchmark_config(j); }, {"reference_iterations"});

  CHECK(parse_benchmark_config(json{{"scenarios", json::array()}}).scenarios.empty());
}

TEST_CASE("json file loading distinguishes missing from malformed") {
  const auto dir = test::scratch_dir("io-json");
  const std::string path = (dir / "c.json").string();
  CHECK_THROWS_AS(load_json_file(path), IoError);
  write_text_file(path, "{\"a\": [1, 2");
  CHECK_THROWS_AS(load_json_file(path), ConfigError);
  write_text_file(path, "{\"a\": [1, 2]}\n");
  CHECK(load_json_file(path)["a"][1] == 2);
}
