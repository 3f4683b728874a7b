#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"
#include "gapq/cli.hpp"
#include "gapq/error.hpp"

using namespace gapq;
using namespace gapq::cli;
namespace fs = std::filesystem;

namespace {
const fs::path kConfigs = GAPQ_CONFIG_DIR;

std::string slurp(const fs::path& p) {
  std::ifstream in(p);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  auto p = fs::temp_directory_path() / ("gapq_test_cli_" + name);
  fs::remove_all(p);
  return p;
}

// Minimal valid config with a placeholder that tests splice text into.
std::string config(const std::string& batch = R"({"label": "u", "uniform_range": [1, 7]})",
                   const std::string& extra = "", const std::string& lambda = "50") {
  return R"({
    "name": "t", "experiment": "analyze",
    "model": {
      "phase_process": {"generator_per_s": [[-0.016666666666666666, 0.016666666666666666],
                                            [0.004166666666666667, -0.004166666666666667]],
                        "rates_vph": [3, 1], "mean_flow_vph": 420},
      "behavior": {"kind": "B1", "gaps": [{"T_s": 7, "p": 1}]},
      "batch": )" + batch + R"(,
      "lambda_bph": )" + lambda + R"(
    })" + extra + "}";
}

std::string error_of(const std::string& text) {
  try {
    parse_config_text(text);
  } catch (const ConfigError& e) {
    return e.what();
  }
  return "";
}
}  // namespace

TEST_CASE("shipped Example 1 config: q1 = 3 q2, mu1 = 1/60, mu2 = 1/240, lambda = 50/h") {
  const auto spec = parse_config(kConfigs / "example1.json");
  const auto p = build_process(spec.model.phase);
  CHECK(p.rates()[0] == doctest::Approx(3 * p.rates()[1]));
  CHECK(-p.generator()(0, 0) == doctest::Approx(1.0 / 60));
  CHECK(-p.generator()(1, 1) == doctest::Approx(1.0 / 240));
  CHECK(mean_flow_rate(p) == doctest::Approx(420.0 / 3600));
  const auto scs = scenarios(spec);
  REQUIRE(scs.size() == 9);
  CHECK(scs[0].lambda == doctest::Approx(50.0 / 3600).epsilon(1e-15));
  CHECK(scs[8].lambda == doctest::Approx(200.0 / 3600));  // no-batches variant
  CHECK(scs[8].batch.mean() == 1.0);
}

TEST_CASE("round trip parse(emit(spec)) == spec for every shipped config") {
  for (const char* name : {"example1.json", "example2.json", "example3.json"}) {
    CAPTURE(name);
    const auto spec = parse_config(kConfigs / name);
    const auto again = parse_config_text(emit_config(spec));
    CHECK(again == spec);
    CHECK(emit_config(again) == emit_config(spec));
  }
}

TEST_CASE("validation names the offending key") {
  CHECK(error_of(config(R"({"label": "x", "pmf": [{"k": 1, "p": 0.49}, {"k": 7, "p": 0.5}]})"))
            .find("model.batch") != std::string::npos);
  CHECK(error_of(config(R"({"label": "x", "uniform_range": [1, 7], "colour": 1})")) ==
        "model.batch.colour: is not a recognised key");
  CHECK(error_of(config(R"({"label": "x", "uniform_range": [1, 7]})", R"(, "spare": 1)")) ==
        "spare: is not a recognised key");
  CHECK(error_of(config(R"({"label": "x", "uniform_range": [1, 7]})", "", "-1")) ==
        "model.lambda_bph: must be > 0");
  CHECK(error_of(config(R"({"label": "x", "uniform_range": [1, 7]})",
                        R"(, "sweep": {"axis": "qbar_vph", "grid": [10, 30, 20]})")) ==
        "sweep.grid: must be strictly increasing");
  CHECK(error_of(config(R"({"label": "x", "uniform_range": [1, 7]})",
                        R"(, "sweep": {"axis": "speed", "grid": [10]})")) == "sweep.axis: must be qbar_vph or lambda_bph");
  CHECK(error_of("{ not json").find("malformed JSON") != std::string::npos);
  CHECK(error_of(config("{\"label\": \"x\", \"pmf\": [{\"k\": 0, \"p\": 1}]}")) ==
        "model.batch.pmf[0].k: must be an integer >= 1");
}

TEST_CASE("pmf summing to 0.99 is rejected") {
  CHECK_THROWS_AS(parse_config_text(config(R"({"label": "x", "pmf": [{"k": 1, "p": 0.49}, {"k": 2, "p": 0.5}]})")),
                  ConfigError);
}

TEST_CASE("lambda in batches per hour is converted to per second") {
  const auto spec = parse_config_text(config());
  CHECK(spec.model.lambda_bph == 50.0);
  CHECK(scenarios(spec).front().lambda == 50.0 / 3600.0);
}

TEST_CASE("analytic runs refuse rho >= 1 at parse time") {
  CHECK_THROWS_AS(parse_config_text(config(R"({"label": "u", "uniform_range": [1, 7]})", "", "200")), UnstableError);
}

TEST_CASE("exit codes are distinct per category") {
  CHECK(exit_code(ErrorCategory::config) == 2);
  CHECK(exit_code(ErrorCategory::model) == 3);
  CHECK(exit_code(ErrorCategory::unstable) == 4);
  CHECK(exit_code(ErrorCategory::numerical) == 5);
}

TEST_CASE("table1 emits the 3 x 3 x 2 grid with the stable CSV header") {
  const auto out = scratch("table1");
  const auto res = run_experiment(parse_config(kConfigs / "example1.json"), {.out_dir = out});
  CHECK(res.rows.size() == 18);
  const auto csv = slurp(out / "table1.csv");
  CHECK(csv.rfind(std::string(kCsvHeader) + "\n", 0) == 0);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 19);
  for (const auto& r : res.rows) CHECK(r.source == "analytic");
  // B3 / low-high / 420
  CHECK(res.rows[5].behavior == "B3");
  CHECK(res.rows[5].batch_dist == "low/high");
  CHECK(res.rows[5].qbar_vph == doctest::Approx(420));
  CHECK(res.rows[5].EW == doctest::Approx(105.09).epsilon(0.005));
}

TEST_CASE("sweep flags the Poisson-road B3 instability near 376.2 veh/h") {
  auto spec = parse_config(kConfigs / "example2.json");
  spec.behaviors = {spec.behaviors[2]};
  spec.sweep->grid = {300, 370, 380, 420};
  const auto res = run_experiment(spec, {.out_dir = scratch("sweep")});
  REQUIRE(res.rows.size() == 8);
  // MMPP rows first, then Poisson-road rows.
  for (int i = 0; i < 4; ++i) CHECK(std::isfinite(res.rows[i].EW));
  CHECK(std::isfinite(res.rows[4].EW));
  CHECK(std::isfinite(res.rows[5].EW));
  CHECK(std::isnan(res.rows[6].EW));
  CHECK(std::isnan(res.rows[7].EW));
  CHECK(res.rows[6].case_name == "example2/poisson-road");
  CHECK(res.summary.find("Poisson road qbar = 376.2") != std::string::npos);
  const auto sc = scenarios(spec).front();
  CHECK(stability_edge_qbar(sc, true) * 3600 == doctest::Approx(376.2).epsilon(1e-3));
}

TEST_CASE("simulate with a fixed seed writes identical bytes; serial and parallel agree") {
  auto spec = parse_config(kConfigs / "example1.json");
  spec.kind = ExperimentKind::simulate;
  spec.batches = {spec.batches[1]};
  spec.simulation->measure_s = 4 * 3600;
  spec.simulation->warmup_s = 360;
  const auto a = scratch("sim_a"), b = scratch("sim_b"), c = scratch("sim_c");
  run_experiment(spec, {.out_dir = a, .seed = 7, .replications = 4});
  run_experiment(spec, {.out_dir = b, .seed = 7, .replications = 4});
  run_experiment(spec, {.out_dir = c, .seed = 7, .replications = 4, .parallel = false});
  CHECK(slurp(a / "simulate.csv") == slurp(b / "simulate.csv"));
  CHECK(slurp(a / "simulate.csv") == slurp(c / "simulate.csv"));
  CHECK(slurp(a / "simulate_se.csv") == slurp(b / "simulate_se.csv"));
  const auto d = scratch("sim_d");
  run_experiment(spec, {.out_dir = d, .seed = 8, .replications = 4});
  CHECK(slurp(a / "simulate.csv") != slurp(d / "simulate.csv"));
}

TEST_CASE("approx emits paired analytic and approx rows") {
  auto spec = parse_config(kConfigs / "example3.json");
  spec.approx->rho_grid = {0.5};
  const auto res = run_experiment(spec, {.out_dir = scratch("approx")});
  REQUIRE(res.rows.size() == 2);
  CHECK(res.rows[0].source == "analytic");
  CHECK(res.rows[1].source == "approx");
  CHECK(res.rows[0].lambda_bph == res.rows[1].lambda_bph);
  CHECK(res.rows[0].lambda_bph == doctest::Approx(0.5 / 45.67 * 3600).epsilon(0.005));
  CHECK(std::isnan(res.rows[1].VarW));
}
