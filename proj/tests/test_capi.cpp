#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "vaxeq.h"

namespace {

const char* kScenarioText = R"({
  "horizon": 1.0,
  "grid_points": 5,
  "groups": [
    {
      "name": "g1",
      "epsilon": {"kind": "constant", "value": 0.6},
      "r_v": {"kind": "constant", "value": 0.25},
      "r_inf": {"kind": "constant", "value": 0.5}
    },
    {
      "name": "g2",
      "epsilon": {"kind": "constant", "value": 0.4},
      "r_v": {"kind": "constant", "value": 0.05},
      "r_inf": {"kind": "constant", "value": 0.5}
    }
  ],
  "pi_model": {
    "kind": "constant",
    "c": [
      {"kind": "constant", "value": 0.2},
      {"kind": "constant", "value": 0.2}
    ]
  }
})";

std::filesystem::path temp_dir() {
  const auto dir = std::filesystem::temp_directory_path() / "vaxeq_capi_test";
  std::filesystem::create_directories(dir);
  return dir;
}

struct ScenarioHandle {
  vaxeq_scenario* ptr = nullptr;
  ~ScenarioHandle() { vaxeq_scenario_free(ptr); }
};

struct SolutionHandle {
  vaxeq_solution* ptr = nullptr;
  ~SolutionHandle() { vaxeq_solution_free(ptr); }
};

}  // namespace

TEST_CASE("scenario lifecycle through the C surface") {
  ScenarioHandle s;
  REQUIRE(vaxeq_scenario_parse(kScenarioText, &s.ptr) == VAXEQ_OK);
  CHECK(vaxeq_scenario_groups(s.ptr) == 2);
  CHECK(vaxeq_scenario_grid_points(s.ptr) == 5);
  CHECK(vaxeq_scenario_horizon(s.ptr) == 1.0);

  char* text = nullptr;
  REQUIRE(vaxeq_scenario_text(s.ptr, &text) == VAXEQ_OK);
  ScenarioHandle reparsed;
  REQUIRE(vaxeq_scenario_parse(text, &reparsed.ptr) == VAXEQ_OK);
  char* text2 = nullptr;
  REQUIRE(vaxeq_scenario_text(reparsed.ptr, &text2) == VAXEQ_OK);
  CHECK(std::string(text) == text2);
  vaxeq_free_text(text);
  vaxeq_free_text(text2);

  CHECK(vaxeq_scenario_set_grid_points(s.ptr, 9) == VAXEQ_OK);
  CHECK(vaxeq_scenario_grid_points(s.ptr) == 9);
  CHECK(vaxeq_scenario_set_grid_points(s.ptr, 1) == VAXEQ_ERR_INVALID_ARGUMENT);
  CHECK(vaxeq_scenario_set_tol(s.ptr, 1e-9) == VAXEQ_OK);
  CHECK(vaxeq_scenario_set_tol(s.ptr, -1.0) == VAXEQ_ERR_INVALID_ARGUMENT);
}

TEST_CASE("parse and load failures set the status and message") {
  vaxeq_scenario* raw = nullptr;
  CHECK(vaxeq_scenario_parse("{ nope", &raw) == VAXEQ_ERR_PARSE);
  CHECK(std::string(vaxeq_last_error()).size() > 0);
  CHECK(vaxeq_scenario_load("/nonexistent/path.scenario", &raw) == VAXEQ_ERR_IO);
  CHECK(vaxeq_scenario_parse(nullptr, &raw) == VAXEQ_ERR_INVALID_ARGUMENT);

  // validation failures are distinguished from syntax failures
  std::string bad = kScenarioText;
  bad.replace(bad.find("\"value\": 0.6"), 12, "\"value\": 0.7");
  CHECK(vaxeq_scenario_parse(bad.c_str(), &raw) == VAXEQ_ERR_VALIDATION);
}

TEST_CASE("solve, query, csv round trip, verify, oracle, report") {
  ScenarioHandle s;
  REQUIRE(vaxeq_scenario_parse(kScenarioText, &s.ptr) == VAXEQ_OK);

  SolutionHandle sol;
  REQUIRE(vaxeq_solve(s.ptr, 0, &sol.ptr) == VAXEQ_OK);
  CHECK(vaxeq_solution_nodes(sol.ptr) == 5);
  CHECK(vaxeq_solution_groups(sol.ptr) == 2);
  CHECK(vaxeq_solution_max_residual(sol.ptr) <= 1e-10);

  double t = -1.0;
  REQUIRE(vaxeq_solution_node_time(sol.ptr, 0, &t) == VAXEQ_OK);
  CHECK(t == 0.0);
  double q = -1.0, a = -1.0, b = -1.0;
  REQUIRE(vaxeq_solution_value(sol.ptr, 0, 0, &q, &a, &b) == VAXEQ_OK);
  CHECK(q == 0.0);
  CHECK(a == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(b == 0.0);
  double p = -1.0;
  REQUIRE(vaxeq_solution_coverage(sol.ptr, 0, &p) == VAXEQ_OK);
  CHECK(p == doctest::Approx(0.4).epsilon(1e-14));
  CHECK(vaxeq_solution_value(sol.ptr, 99, 0, &q, &a, &b) == VAXEQ_ERR_INVALID_ARGUMENT);

  const auto dir = temp_dir();
  const auto csv = (dir / "bangbang.csv").string();
  long rows = 0;
  REQUIRE(vaxeq_solution_write_csv(sol.ptr, csv.c_str(), &rows) == VAXEQ_OK);
  CHECK(rows == 10);

  SolutionHandle imported;
  REQUIRE(vaxeq_solution_read_csv(s.ptr, csv.c_str(), &imported.ptr) == VAXEQ_OK);
  CHECK(vaxeq_solution_max_residual(imported.ptr) <= 1e-10);

  vaxeq_verification v{};
  REQUIRE(vaxeq_verify(imported.ptr, 1, &v) == VAXEQ_OK);
  CHECK(v.pass == 1);
  CHECK(v.kkt_residual <= 1e-6);
  CHECK(v.complementarity_residual <= 1e-8);
  CHECK(v.duality_gap <= 1e-8);
  CHECK(v.sign_conditions_pass == 1);
  CHECK(v.saddle_pass == 1);
  CHECK(v.evi_pass == 1);
  CHECK(v.residual_pass == 1);

  int agrees = -1;
  double gap = -1.0, gain = -1.0;
  REQUIRE(vaxeq_oracle_compare(sol.ptr, &agrees, &gap, &gain) == VAXEQ_OK);
  CHECK(agrees == 1);

  char* report = nullptr;
  REQUIRE(vaxeq_report(sol.ptr, 1, &report) == VAXEQ_OK);
  CHECK(std::string(report).find("case (a)") != std::string::npos);
  vaxeq_free_text(report);

  CHECK(vaxeq_solution_write_csv(sol.ptr, "/nonexistent/dir/x.csv", &rows) == VAXEQ_ERR_IO);
  std::filesystem::remove_all(dir);
}

TEST_CASE("corrupted csv fails verification through the C surface") {
  ScenarioHandle s;
  REQUIRE(vaxeq_scenario_parse(kScenarioText, &s.ptr) == VAXEQ_OK);
  SolutionHandle sol;
  REQUIRE(vaxeq_solve(s.ptr, 0, &sol.ptr) == VAXEQ_OK);

  const auto dir = temp_dir();
  const auto csv = (dir / "corrupt.csv").string();
  REQUIRE(vaxeq_solution_write_csv(sol.ptr, csv.c_str(), nullptr) == VAXEQ_OK);

  std::ifstream in(csv);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  in.close();
  text.replace(text.find("0,g1,0,"), 7, "0,g1,1,");
  std::ofstream out(csv, std::ios::trunc);
  out << text;
  out.close();

  SolutionHandle imported;
  REQUIRE(vaxeq_solution_read_csv(s.ptr, csv.c_str(), &imported.ptr) == VAXEQ_OK);
  vaxeq_verification v{};
  REQUIRE(vaxeq_verify(imported.ptr, 1, &v) == VAXEQ_OK);
  CHECK(v.pass == 0);
  CHECK(v.sign_conditions_pass == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("parallel solve through the C surface") {
  ScenarioHandle s;
  REQUIRE(vaxeq_scenario_parse(kScenarioText, &s.ptr) == VAXEQ_OK);
  SolutionHandle sol;
  REQUIRE(vaxeq_solve(s.ptr, 1, &sol.ptr) == VAXEQ_OK);
  double q = -1.0;
  REQUIRE(vaxeq_solution_value(sol.ptr, 4, 1, &q, nullptr, nullptr) == VAXEQ_OK);
  CHECK(q == 1.0);
}

TEST_CASE("output names honor the scenario overrides") {
  std::string text = kScenarioText;
  text.insert(text.rfind('}'), R"(,
  "output": {"csv": "custom.csv", "report": "custom.txt"}
)");
  ScenarioHandle s;
  REQUIRE(vaxeq_scenario_parse(text.c_str(), &s.ptr) == VAXEQ_OK);
  char* name = nullptr;
  REQUIRE(vaxeq_scenario_output_name(s.ptr, 0, &name) == VAXEQ_OK);
  CHECK(std::string(name) == "custom.csv");
  vaxeq_free_text(name);
  REQUIRE(vaxeq_scenario_output_name(s.ptr, 1, &name) == VAXEQ_OK);
  CHECK(std::string(name) == "custom.txt");
  vaxeq_free_text(name);

  // defaults fall back to the scenario stem
  ScenarioHandle plain;
  REQUIRE(vaxeq_scenario_parse(kScenarioText, &plain.ptr) == VAXEQ_OK);
  REQUIRE(vaxeq_scenario_output_name(plain.ptr, 0, &name) == VAXEQ_OK);
  CHECK(std::string(name) == "scenario.csv");
  vaxeq_free_text(name);
}

TEST_CASE("status names cover the enum") {
  CHECK(std::string(vaxeq_status_name(VAXEQ_OK)) == "ok");
  CHECK(std::string(vaxeq_status_name(VAXEQ_ERR_PARSE)) == "parse error");
  CHECK(std::string(vaxeq_version()).size() > 0);
}
