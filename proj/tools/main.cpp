// vaxeq command line: solve / verify / oracle-compare / report pipelines over
// scenario files. Talks to the solver exclusively through the C API.

#include <cinttypes>
#include <cstdio>
#include <filesystem>
#include <memory>
#include <string>

#include "CLI11.hpp"
#include "vaxeq.h"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;     // argv or scenario parse errors
constexpr int kExitVerify = 2;    // a verification tolerance is violated
constexpr int kExitDisagree = 3;  // solver and oracle disagree

struct ScenarioDeleter {
  void operator()(vaxeq_scenario* s) const { vaxeq_scenario_free(s); }
};
struct SolutionDeleter {
  void operator()(vaxeq_solution* s) const { vaxeq_solution_free(s); }
};
using ScenarioPtr = std::unique_ptr<vaxeq_scenario, ScenarioDeleter>;
using SolutionPtr = std::unique_ptr<vaxeq_solution, SolutionDeleter>;

struct Options {
  std::string scenario_path;
  std::string out_dir = ".";
  std::uint64_t seed = 1;
  double tol = 0.0;      // 0: keep the scenario's tolerance
  int grid_points = 0;   // 0: keep the scenario's grid
  bool parallel = false;
};

void diag(const std::string& msg) { std::fprintf(stderr, "vaxeq: %s\n", msg.c_str()); }

ScenarioPtr load_scenario(const Options& opt, int& exit_code) {
  vaxeq_scenario* raw = nullptr;
  vaxeq_status st = vaxeq_scenario_load(opt.scenario_path.c_str(), &raw);
  if (st != VAXEQ_OK) {
    diag(std::string(vaxeq_status_name(st)) + ": " + vaxeq_last_error());
    exit_code = kExitUsage;
    return nullptr;
  }
  ScenarioPtr scenario(raw);
  if (opt.grid_points > 0 &&
      vaxeq_scenario_set_grid_points(scenario.get(), opt.grid_points) != VAXEQ_OK) {
    diag(std::string("bad --grid-points: ") + vaxeq_last_error());
    exit_code = kExitUsage;
    return nullptr;
  }
  if (opt.tol > 0.0 && vaxeq_scenario_set_tol(scenario.get(), opt.tol) != VAXEQ_OK) {
    diag(std::string("bad --tol: ") + vaxeq_last_error());
    exit_code = kExitUsage;
    return nullptr;
  }
  return scenario;
}

std::filesystem::path output_path(const vaxeq_scenario* scenario, const Options& opt, int which) {
  char* name = nullptr;
  vaxeq_scenario_output_name(scenario, which, &name);
  std::filesystem::path p = std::filesystem::path(opt.out_dir) / name;
  vaxeq_free_text(name);
  return p;
}

SolutionPtr solve(const vaxeq_scenario* scenario, const Options& opt, int& exit_code) {
  vaxeq_solution* raw = nullptr;
  vaxeq_status st = vaxeq_solve(scenario, opt.parallel ? 1 : 0, &raw);
  if (st != VAXEQ_OK) {
    diag(std::string(vaxeq_status_name(st)) + ": " + vaxeq_last_error());
    exit_code = st == VAXEQ_ERR_SOLVE ? kExitVerify : kExitUsage;
    return nullptr;
  }
  return SolutionPtr(raw);
}

int cmd_solve(const Options& opt) {
  int code = kExitOk;
  ScenarioPtr scenario = load_scenario(opt, code);
  if (!scenario) return code;
  SolutionPtr solution = solve(scenario.get(), opt, code);
  if (!solution) return code;

  std::filesystem::create_directories(opt.out_dir);
  const std::filesystem::path csv = output_path(scenario.get(), opt, 0);
  long rows = 0;
  vaxeq_status st = vaxeq_solution_write_csv(solution.get(), csv.string().c_str(), &rows);
  if (st != VAXEQ_OK) {
    diag(std::string(vaxeq_status_name(st)) + ": " + vaxeq_last_error());
    return kExitUsage;
  }
  diag("solved " + std::to_string(vaxeq_solution_nodes(solution.get())) + " nodes, wrote " +
       std::to_string(rows) + " rows to " + csv.string());
  return kExitOk;
}

int cmd_verify(const Options& opt) {
  int code = kExitOk;
  ScenarioPtr scenario = load_scenario(opt, code);
  if (!scenario) return code;

  const std::filesystem::path csv = output_path(scenario.get(), opt, 0);
  vaxeq_solution* raw = nullptr;
  vaxeq_status st = vaxeq_solution_read_csv(scenario.get(), csv.string().c_str(), &raw);
  if (st != VAXEQ_OK) {
    diag("cannot verify " + csv.string() + ": " + vaxeq_last_error());
    return kExitVerify;
  }
  SolutionPtr solution(raw);

  vaxeq_verification v{};
  st = vaxeq_verify(solution.get(), opt.seed, &v);
  if (st != VAXEQ_OK) {
    diag(std::string(vaxeq_status_name(st)) + ": " + vaxeq_last_error());
    return kExitVerify;
  }
  std::fprintf(stderr,
               "vaxeq: verify %s\n"
               "  kkt residual        %.3e\n"
               "  complementarity     %.3e\n"
               "  duality gap         %.3e (primal %.3e, dual %.3e)\n"
               "  natural residual    %.3e (%s)\n"
               "  sign conditions     %s\n"
               "  saddle point        %s (worst violation %.3e)\n"
               "  inequality sampling min psi(P) %.3e, psi(Q) %.3e (%s)\n",
               csv.string().c_str(), v.kkt_residual, v.complementarity_residual, v.duality_gap,
               v.primal_value, v.dual_value, v.max_natural_residual,
               v.residual_pass ? "pass" : "FAIL", v.sign_conditions_pass ? "pass" : "FAIL",
               v.saddle_pass ? "pass" : "FAIL", v.saddle_worst_violation, v.evi_min_sampled,
               v.evi_identity, v.evi_pass ? "pass" : "FAIL");
  if (!v.pass) {
    diag("verification FAILED");
    return kExitVerify;
  }
  diag("verification passed");
  return kExitOk;
}

int cmd_oracle_compare(const Options& opt) {
  int code = kExitOk;
  ScenarioPtr scenario = load_scenario(opt, code);
  if (!scenario) return code;
  SolutionPtr solution = solve(scenario.get(), opt, code);
  if (!solution) return code;

  int agrees = 0;
  double gap = 0.0, gain = 0.0;
  vaxeq_status st = vaxeq_oracle_compare(solution.get(), &agrees, &gap, &gain);
  if (st != VAXEQ_OK) {
    diag(std::string(vaxeq_status_name(st)) + ": " + vaxeq_last_error());
    return kExitDisagree;
  }
  std::fprintf(stderr, "vaxeq: oracle compare: max strategy gap %.3e, max payoff gain %.3e\n", gap,
               gain);
  if (!agrees) {
    diag("solver and oracle DISAGREE");
    return kExitDisagree;
  }
  diag("solver and oracle agree");
  return kExitOk;
}

int cmd_report(const Options& opt) {
  int code = kExitOk;
  ScenarioPtr scenario = load_scenario(opt, code);
  if (!scenario) return code;
  SolutionPtr solution = solve(scenario.get(), opt, code);
  if (!solution) return code;

  char* text = nullptr;
  vaxeq_status st = vaxeq_report(solution.get(), opt.seed, &text);
  if (st != VAXEQ_OK) {
    diag(std::string(vaxeq_status_name(st)) + ": " + vaxeq_last_error());
    return kExitUsage;
  }
  std::filesystem::create_directories(opt.out_dir);
  const std::filesystem::path path = output_path(scenario.get(), opt, 1);
  std::FILE* f = std::fopen(path.string().c_str(), "wb");
  if (!f) {
    vaxeq_free_text(text);
    diag("cannot write " + path.string());
    return kExitUsage;
  }
  std::fputs(text, f);
  std::fclose(f);
  vaxeq_free_text(text);
  diag("wrote " + path.string());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"equilibrium solver for group vaccination games"};
  app.require_subcommand(1);

  Options opt;
  auto add_common = [&opt](CLI::App* cmd) {
    cmd->add_option("scenario", opt.scenario_path, "scenario file")->required();
    cmd->add_option("--out", opt.out_dir, "output directory");
    cmd->add_option("--seed", opt.seed, "seed for the sampling checks");
    cmd->add_option("--tol", opt.tol, "override the solver tolerance");
    cmd->add_option("--grid-points", opt.grid_points, "override the number of grid nodes");
    cmd->add_flag("--parallel", opt.parallel, "solve grid nodes concurrently");
  };
  add_common(app.add_subcommand("solve", "solve the scenario and write the time-series CSV"));
  add_common(app.add_subcommand("verify", "re-verify a previously written CSV"));
  add_common(app.add_subcommand("oracle-compare", "cross-check the solver against best-response search"));
  add_common(app.add_subcommand("report", "solve and write the interpretation report"));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e) == 0 ? kExitOk : kExitUsage;
  }

  if (app.got_subcommand("solve")) return cmd_solve(opt);
  if (app.got_subcommand("verify")) return cmd_verify(opt);
  if (app.got_subcommand("oracle-compare")) return cmd_oracle_compare(opt);
  if (app.got_subcommand("report")) return cmd_report(opt);
  return kExitUsage;
}
