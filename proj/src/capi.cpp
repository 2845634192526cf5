#include "vaxeq.h"

#include <algorithm>
#include <cstring>
#include <filesystem>
#include <memory>
#include <string>

#include "duality.hpp"
#include "errors.hpp"
#include "evi_solver.hpp"
#include "oracle.hpp"
#include "scenario.hpp"

using namespace vaxeq;

struct vaxeq_scenario {
  Scenario scenario;
  std::string stem = "scenario";  // from the load path; used for output names
};

struct vaxeq_solution {
  Scenario scenario;
  StrategyProfile profile;
  MultiplierPair multipliers;
  RegimeClassification regimes;
  double max_residual = 0.0;
  bool imported = false;
};

namespace {

thread_local std::string t_last_error;

void set_error(const std::string& msg) { t_last_error = msg; }

template <typename Fn>
vaxeq_status guarded(Fn&& fn) {
  try {
    fn();
    return VAXEQ_OK;
  } catch (const ScenarioError& e) {
    set_error(e.what());
    return VAXEQ_ERR_PARSE;
  } catch (const ValidationError& e) {
    set_error(e.what());
    return VAXEQ_ERR_VALIDATION;
  } catch (const SolveError& e) {
    set_error(e.what());
    return VAXEQ_ERR_SOLVE;
  } catch (const OracleError& e) {
    set_error(e.what());
    return VAXEQ_ERR_ORACLE;
  } catch (const IoError& e) {
    set_error(e.what());
    return VAXEQ_ERR_IO;
  } catch (const DomainError& e) {
    set_error(e.what());
    return VAXEQ_ERR_INVALID_ARGUMENT;
  } catch (const std::exception& e) {
    set_error(e.what());
    return VAXEQ_ERR_INTERNAL;
  }
}

char* copy_text(const std::string& s) {
  char* out = new char[s.size() + 1];
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

double residual_from_scratch(const vaxeq_solution& sol) {
  const auto& s = sol.scenario;
  double worst = 0.0;
  for (int n = 0; n < sol.profile.grid.n_nodes; ++n) {
    const double t = sol.profile.grid.node(n);
    const double gamma = s.solver.gamma > 0.0 ? s.solver.gamma : default_gamma(s.model, t);
    worst = std::max(worst, natural_residual(s.model, t, sol.profile.slice(n), gamma));
  }
  return worst;
}

}  // namespace

extern "C" {

const char* vaxeq_version(void) { return "1.0.0"; }

const char* vaxeq_status_name(vaxeq_status status) {
  switch (status) {
    case VAXEQ_OK: return "ok";
    case VAXEQ_ERR_INVALID_ARGUMENT: return "invalid argument";
    case VAXEQ_ERR_PARSE: return "parse error";
    case VAXEQ_ERR_VALIDATION: return "validation error";
    case VAXEQ_ERR_SOLVE: return "solve error";
    case VAXEQ_ERR_IO: return "io error";
    case VAXEQ_ERR_ORACLE: return "oracle error";
    case VAXEQ_ERR_INTERNAL: return "internal error";
  }
  return "unknown";
}

const char* vaxeq_last_error(void) { return t_last_error.c_str(); }

vaxeq_status vaxeq_scenario_parse(const char* text, vaxeq_scenario** out) {
  if (!text || !out) {
    set_error("null argument");
    return VAXEQ_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    auto handle = std::make_unique<vaxeq_scenario>();
    handle->scenario = parse_scenario(text);
    *out = handle.release();
  });
}

vaxeq_status vaxeq_scenario_load(const char* path, vaxeq_scenario** out) {
  if (!path || !out) {
    set_error("null argument");
    return VAXEQ_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    auto handle = std::make_unique<vaxeq_scenario>();
    handle->scenario = load_scenario(path);
    handle->stem = std::filesystem::path(path).stem().string();
    *out = handle.release();
  });
}

void vaxeq_scenario_free(vaxeq_scenario* scenario) { delete scenario; }

vaxeq_status vaxeq_scenario_text(const vaxeq_scenario* scenario, char** out) {
  if (!scenario || !out) {
    set_error("null argument");
    return VAXEQ_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] { *out = copy_text(serialize_scenario(scenario->scenario)); });
}

int vaxeq_scenario_groups(const vaxeq_scenario* scenario) {
  return scenario ? scenario->scenario.model.group_count() : 0;
}

int vaxeq_scenario_grid_points(const vaxeq_scenario* scenario) {
  return scenario ? scenario->scenario.grid_points : 0;
}

double vaxeq_scenario_horizon(const vaxeq_scenario* scenario) {
  return scenario ? scenario->scenario.model.horizon : 0.0;
}

vaxeq_status vaxeq_scenario_set_grid_points(vaxeq_scenario* scenario, int grid_points) {
  if (!scenario) {
    set_error("null scenario");
    return VAXEQ_ERR_INVALID_ARGUMENT;
  }
  if (grid_points < 2) {
    set_error("grid_points must be at least 2");
    return VAXEQ_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    // Re-validate on the new grid before committing.
    Scenario trial = scenario->scenario;
    trial.grid_points = grid_points;
    require_valid(trial.model, trial.grid());
    scenario->scenario.grid_points = grid_points;
  });
}

vaxeq_status vaxeq_scenario_set_tol(vaxeq_scenario* scenario, double tol) {
  if (!scenario || !(tol > 0.0)) {
    set_error("tol must be positive");
    return VAXEQ_ERR_INVALID_ARGUMENT;
  }
  scenario->scenario.solver.tol = tol;
  return VAXEQ_OK;
}

vaxeq_status vaxeq_scenario_output_name(const vaxeq_scenario* scenario, int which, char** out) {
  if (!scenario || !out || which < 0 || which > 1) {
    set_error("bad arguments");
    return VAXEQ_ERR_INVALID_ARGUMENT;
  }
  const auto& o = scenario->scenario.output;
  std::string name;
  if (which == 0)
    name = o.csv.empty() ? scenario->stem + ".csv" : o.csv;
  else
    name = o.report.empty() ? scenario->stem + "_report.txt" : o.report;
  *out = copy_text(name);
  return VAXEQ_OK;
}

vaxeq_status vaxeq_solve(const vaxeq_scenario* scenario, int parallel, vaxeq_solution** out) {
  if (!scenario || !out) {
    set_error("null argument");
    return VAXEQ_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const Scenario& s = scenario->scenario;
    ProfileSolution solved = solve_profile(s.model, s.grid(), s.solver, parallel != 0);
    auto handle = std::make_unique<vaxeq_solution>();
    handle->scenario = s;
    handle->profile = std::move(solved.profile);
    handle->regimes = classify_regimes(handle->profile);
    handle->multipliers =
        extract_multipliers(s.model, handle->profile, handle->regimes, s.solver.tol);
    handle->max_residual = solved.max_residual();
    *out = handle.release();
  });
}

void vaxeq_solution_free(vaxeq_solution* solution) { delete solution; }

int vaxeq_solution_nodes(const vaxeq_solution* solution) {
  return solution ? solution->profile.grid.n_nodes : 0;
}

int vaxeq_solution_groups(const vaxeq_solution* solution) { return solution ? solution->profile.k : 0; }

vaxeq_status vaxeq_solution_node_time(const vaxeq_solution* solution, int node, double* t) {
  if (!solution || !t || node < 0 || node >= solution->profile.grid.n_nodes) {
    set_error("bad arguments");
    return VAXEQ_ERR_INVALID_ARGUMENT;
  }
  *t = solution->profile.grid.node(node);
  return VAXEQ_OK;
}

vaxeq_status vaxeq_solution_value(const vaxeq_solution* solution, int node, int group,
                                  double* strategy, double* alpha, double* beta) {
  if (!solution || node < 0 || node >= solution->profile.grid.n_nodes || group < 0 ||
      group >= solution->profile.k) {
    set_error("bad arguments");
    return VAXEQ_ERR_INVALID_ARGUMENT;
  }
  if (strategy) *strategy = solution->profile.at(node, group);
  if (alpha) *alpha = solution->multipliers.alpha_at(node, group);
  if (beta) *beta = solution->multipliers.beta_at(node, group);
  return VAXEQ_OK;
}

vaxeq_status vaxeq_solution_coverage(const vaxeq_solution* solution, int node, double* out) {
  if (!solution || !out || node < 0 || node >= solution->profile.grid.n_nodes) {
    set_error("bad arguments");
    return VAXEQ_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    *out = coverage(solution->scenario.model, solution->profile.grid.node(node),
                    solution->profile.slice(node));
  });
}

double vaxeq_solution_max_residual(const vaxeq_solution* solution) {
  return solution ? solution->max_residual : -1.0;
}

vaxeq_status vaxeq_solution_write_csv(const vaxeq_solution* solution, const char* path,
                                      long* rows_written) {
  if (!solution || !path) {
    set_error("null argument");
    return VAXEQ_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const long rows = write_timeseries_csv(std::filesystem::path(path), solution->scenario.model,
                                           solution->profile, solution->multipliers,
                                           solution->regimes);
    if (rows_written) *rows_written = rows;
  });
}

vaxeq_status vaxeq_solution_read_csv(const vaxeq_scenario* scenario, const char* path,
                                     vaxeq_solution** out) {
  if (!scenario || !path || !out) {
    set_error("null argument");
    return VAXEQ_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    ImportedSolution imported = read_timeseries_csv(std::filesystem::path(path), scenario->scenario);
    auto handle = std::make_unique<vaxeq_solution>();
    handle->scenario = scenario->scenario;
    handle->profile = std::move(imported.strategy);
    handle->multipliers = std::move(imported.multipliers);
    handle->regimes = classify_regimes(handle->profile);
    handle->imported = true;
    handle->max_residual = residual_from_scratch(*handle);
    *out = handle.release();
  });
}

vaxeq_status vaxeq_verify(const vaxeq_solution* solution, uint64_t seed, vaxeq_verification* out) {
  if (!solution || !out) {
    set_error("null argument");
    return VAXEQ_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    VerifyOptions options;
    options.seed = seed;
    options.sign_tol = solution->scenario.solver.tol;
    const DualityReport report =
        verify_solution(solution->scenario.model, solution->profile, solution->multipliers,
                        solution->scenario.solver, options);
    *out = vaxeq_verification{};
    out->kkt_residual = report.kkt_residual;
    out->complementarity_residual = report.complementarity_residual;
    out->duality_gap = report.gap.gap;
    out->primal_value = report.gap.primal;
    out->dual_value = report.gap.dual;
    out->max_natural_residual = report.max_natural_residual;
    out->evi_identity = report.evi_identity;
    out->evi_min_sampled = report.evi_min_sampled;
    out->saddle_worst_violation = report.saddle.worst_violation;
    out->lagrangian_at_solution = report.lagrangian_at_solution;
    out->sign_conditions_pass = report.sign_conditions.pass ? 1 : 0;
    out->saddle_pass = report.saddle.pass ? 1 : 0;
    out->evi_pass = report.evi_pass ? 1 : 0;
    out->residual_pass = report.residual_pass ? 1 : 0;
    out->pass = report.pass ? 1 : 0;
  });
}

vaxeq_status vaxeq_oracle_compare(const vaxeq_solution* solution, int* agrees,
                                  double* max_strategy_gap, double* max_payoff_gain) {
  if (!solution || !agrees) {
    set_error("null argument");
    return VAXEQ_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    const Scenario& s = solution->scenario;
    const int k = s.model.group_count();
    double worst_gain = 0.0;
    double worst_gap = 0.0;
    for (int n = 0; n < solution->profile.grid.n_nodes; ++n) {
      const double t = solution->profile.grid.node(n);
      const NashCheck check = nash_check(s.model, t, solution->profile.slice(n), s.oracle);
      worst_gain = std::max(worst_gain, check.best_gain);
      if (k <= 3) {
        const std::vector<double> reference = equilibrium_oracle(s.model, t, s.oracle);
        for (int i = 0; i < k; ++i)
          worst_gap = std::max(
              worst_gap, std::abs(reference[static_cast<std::size_t>(i)] - solution->profile.at(n, i)));
      }
    }
    const bool gain_ok = worst_gain <= s.oracle.improvement_tol;
    const bool gap_ok = k > 3 || worst_gap <= s.oracle.resolution + s.solver.tol;
    *agrees = (gain_ok && gap_ok) ? 1 : 0;
    if (max_strategy_gap) *max_strategy_gap = worst_gap;
    if (max_payoff_gain) *max_payoff_gain = worst_gain;
  });
}

vaxeq_status vaxeq_report(const vaxeq_solution* solution, uint64_t seed, char** out) {
  if (!solution || !out) {
    set_error("null argument");
    return VAXEQ_ERR_INVALID_ARGUMENT;
  }
  return guarded([&] {
    VerifyOptions options;
    options.seed = seed;
    options.sign_tol = solution->scenario.solver.tol;
    const DualityReport report =
        verify_solution(solution->scenario.model, solution->profile, solution->multipliers,
                        solution->scenario.solver, options);
    *out = copy_text(write_report(solution->scenario.model, solution->profile,
                                  solution->multipliers, solution->regimes, report));
  });
}

void vaxeq_free_text(char* text) { delete[] text; }

}  // extern "C"
