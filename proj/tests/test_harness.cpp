#include "imdp/config.hpp"
#include "imdp/pipeline.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <nlohmann/json.hpp>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace imdp;
namespace fs = std::filesystem;

namespace {

/// Three cells on [0, 3] with the middle one as goal.
nlohmann::json minimal_json() {
  return nlohmann::json::parse(R"({
    "name": "line",
    "system": {
      "A": [[1.0]], "B": [[1.0]], "u_lo": [-2.0], "u_hi": [2.0],
      "noise": {"kind": "gaussian", "mean": [0.0], "covariance": [[0.01]]}
    },
    "partition": {"lo": [0.0], "hi": [3.0], "counts": [3],
                  "goal": [{"lo": [1.0], "hi": [2.0]}]},
    "abstraction": {"samples": 400, "beta": 0.01, "seed": 5},
    "objective": {"horizon": 3, "x0": [0.5]},
    "validation": {"runs": 500, "seed": 9, "traces": 2}
  })");
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / ("imdp_harness_" + name);
  fs::remove_all(dir);
  return dir;
}

void expect_config_error(const nlohmann::json& j, const std::string& path_fragment) {
  CHECK_THROWS_WITH_AS(parse_config(j.dump()), doctest::Contains(path_fragment.c_str()),
                       ConfigError);
}

}  // namespace

TEST_CASE("config: round trip through dump") {
  const auto c = parse_config(minimal_json().dump());
  CHECK(c.name == "line");
  CHECK(c.partition.counts == std::vector<std::size_t>{3});
  CHECK(c.system.q == Vector::Zero(1));
  CHECK(c.validation.runs == 500);
  const auto again = parse_config(dump_config(c));
  CHECK(dump_config(again) == dump_config(c));
}

TEST_CASE("config: errors name the offending field") {
  auto j = minimal_json();
  SUBCASE("goal overlapping an obstacle") {
    j["partition"]["critical"] = {{{"lo", {1.5}}, {"hi", {2.5}}}};
    expect_config_error(j, "partition.goal[0]: overlaps partition.critical[0]");
  }
  SUBCASE("touching boxes are fine") {
    j["partition"]["critical"] = {{{"lo", {2.0}}, {"hi", {2.5}}}};
    CHECK_NOTHROW(parse_config(j.dump()));
  }
  SUBCASE("missing field") {
    j["system"].erase("B");
    expect_config_error(j, "system.B: missing field");
  }
  SUBCASE("dimension mismatch") {
    j["objective"]["x0"] = {0.5, 0.5};
    expect_config_error(j, "objective.x0");
  }
  SUBCASE("bad matrix entry") {
    j["system"]["A"] = {{"x"}};
    expect_config_error(j, "system.A[0][0]");
  }
  SUBCASE("sweep not increasing") {
    j["abstraction"]["sweep"] = {100, 50};
    expect_config_error(j, "abstraction.sweep[1]");
  }
  SUBCASE("unknown noise kind") {
    j["system"]["noise"] = {{"kind", "laplace"}};
    expect_config_error(j, "system.noise.kind");
  }
  SUBCASE("non-PSD covariance") {
    j["system"]["noise"]["covariance"] = {{-1.0}};
    expect_config_error(j, "system.noise");
  }
  SUBCASE("beta out of range") {
    j["abstraction"]["beta"] = 1.5;
    expect_config_error(j, "abstraction.beta");
  }
  SUBCASE("malformed JSON") {
    CHECK_THROWS_AS(parse_config("{"), ConfigError);
  }
}

TEST_CASE("presets: shapes and validation") {
  for (const auto& name : preset_names()) CHECK_NOTHROW(preset(name));
  CHECK_THROWS_AS(preset("nope"), ConfigError);

  const auto uav = preset("uav-6d");
  CHECK(uav.objective.x0 == testutil::vec({-14, 0, 6, 0, -6, 0}));
  std::size_t regions = 1;
  for (auto c : uav.partition.counts) regions *= c;
  CHECK(regions <= 5000);
  const auto high = preset("uav-6d-high");
  CHECK(high.system.noise.covariance(0, 0) == doctest::Approx(9 * uav.system.noise.covariance(0, 0)));

  const auto di = preset("double-integrator-2d");
  const auto raw = make_system(di.system);
  CHECK(raw.rank_B() == 1);
  const auto lifted = lift(raw, di.system.lift_steps);
  // Rank oracle: the lifted input matrix is square here, so full rank means
  // a nonzero determinant.
  REQUIRE(lifted.B().rows() == 2);
  REQUIRE(lifted.B().cols() == 2);
  CHECK(std::abs(lifted.B().determinant()) > 1e-6);
  CHECK(lifted.rank_B() == 2);
  CHECK(preset("double-integrator-2d-triangular").system.noise.kind == "triangular");
}

TEST_CASE("pipeline: minimal 1D configuration end to end") {
  const auto cfg = parse_config(minimal_json().dump());
  const auto dir = scratch("min");
  const auto res = run_pipeline(cfg, dir);
  CHECK(res.report.certified > 0.0);
  CHECK(res.report.pass);
  for (const char* f : {"model.sta", "model.tra", "solution.csv", "validation.json",
                        "traces.csv", "summary.json", "timings.json"}) {
    CHECK(fs::exists(dir / f));
  }
  const auto summary = nlohmann::json::parse(slurp(dir / "summary.json"));
  CHECK(summary.at("certified").get<double>() == res.report.certified);
  const auto timings = nlohmann::json::parse(slurp(dir / "timings.json"));
  CHECK(timings.contains("abstraction_seconds"));
  CHECK(timings.contains("solving_seconds"));
  CHECK(timings.contains("validation_seconds"));

  // Traces: header plus one row per visited state.
  std::istringstream traces(slurp(dir / "traces.csv"));
  std::string header;
  std::getline(traces, header);
  CHECK(header == "run,step,x0,u0,outcome");

  // The stored solution parses back to the same values and policy.
  const auto back = parse_solution_csv(slurp(dir / "solution.csv"));
  CHECK(back.horizon == res.solution.horizon);
  CHECK(back.policy == res.solution.policy);
  for (int k = 0; k <= back.horizon; ++k) CHECK(back.values[k] == res.solution.values[k]);

  const auto again = revalidate(cfg, dir);
  CHECK(again.successes == res.report.successes);

  const auto model = export_model(cfg, scratch("min_export"));
  CHECK(model.model == res.abstraction.model);
  fs::remove_all(dir);
}

TEST_CASE("pipeline: identical inputs give byte-identical artifacts") {
  const auto cfg = parse_config(minimal_json().dump());
  const auto a = scratch("det_a"), b = scratch("det_b");
  run_pipeline(cfg, a);
  auto cfg_b = cfg;
  cfg_b.workers = 3;
  run_pipeline(cfg_b, b);
  for (const char* f : {"model.sta", "model.tra", "solution.csv", "validation.json", "traces.csv",
                        "summary.json"}) {
    CHECK_MESSAGE(slurp(a / f) == slurp(b / f), f);
  }
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("pipeline: nothing enabled is reported as vacuous") {
  auto j = minimal_json();
  j["system"]["u_lo"] = {-0.1};
  j["system"]["u_hi"] = {0.1};
  const auto cfg = parse_config(j.dump());
  CHECK_THROWS_AS(run_pipeline(cfg, build_problem(cfg)), VacuousAbstraction);
}

TEST_CASE("sweep: row layout and interval dominance") {
  auto j = minimal_json();
  j["abstraction"]["sweep"] = {50, 200};
  j["validation"]["repetitions"] = 2;
  j["validation"]["runs"] = 200;
  const auto cfg = parse_config(j.dump());
  const auto rows = run_sweep(cfg, build_problem(cfg));
  REQUIRE(rows.size() == 2 * 2 * 2);
  for (std::size_t i = 0; i < rows.size(); i += 2) {
    CHECK(rows[i].model == "imdp");
    CHECK(rows[i + 1].model == "mdp");
    CHECK(rows[i].samples == rows[i + 1].samples);
    CHECK(rows[i].repetition == rows[i + 1].repetition);
    CHECK(rows[i].certified <= rows[i + 1].certified + 1e-12);
  }
  CHECK(rows[0].samples == 50);
  CHECK(rows[4].samples == 200);

  const auto csv = sweep_csv(rows);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 9);
  CHECK(csv.rfind("N,repetition,model,certified,empirical", 0) == 0);

  // Worker count does not change results.
  auto par = cfg;
  par.workers = 3;
  const auto rows_par = run_sweep(par, build_problem(par));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    CHECK(rows_par[i].certified == rows[i].certified);
    CHECK(rows_par[i].empirical == rows[i].empirical);
  }
}

TEST_CASE("sweep: single cell gives two rows") {
  auto j = minimal_json();
  j["abstraction"]["sweep"] = {100};
  j["validation"]["runs"] = 50;
  const auto cfg = parse_config(j.dump());
  const auto dir = scratch("sweep1");
  const auto rows = run_sweep(cfg, dir);
  CHECK(rows.size() == 2);
  CHECK(fs::exists(dir / "sweep.csv"));
  fs::remove_all(dir);
}
