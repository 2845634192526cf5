#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "duality.hpp"
#include "oracle.hpp"

namespace vaxeq {

struct OutputOptions {
  std::string csv;     // file name override; empty selects <scenario stem>.csv
  std::string report;  // file name override; empty selects <scenario stem>_report.txt
};

// Everything one run needs: the game, the grid resolution, solver and oracle
// settings, and output naming.
struct Scenario {
  GameModel model;
  int grid_points = 65;
  SolverParams solver;
  OracleParams oracle;
  OutputOptions output;

  TimeGrid grid() const { return TimeGrid(model.horizon, grid_points); }
};

// Parses the JSON scenario schema (top-level keys: horizon, grid_points,
// groups, pi_model, and optional solver / oracle / output blocks; function
// specs are {"kind":"constant","value":v} or
// {"kind":"piecewise_linear","breakpoints":[[t,v],...]}). The parsed model is
// validated on the scenario grid; invalid scenarios are rejected.
// Throws ScenarioError (syntax, schema) or ValidationError (model checks).
Scenario parse_scenario(const std::string& text);

Scenario load_scenario(const std::filesystem::path& path);

// Canonical serialization: parse(serialize(s)) reproduces serialize(s)
// byte for byte.
std::string serialize_scenario(const Scenario& scenario);

// CSV schema: header "t,group,Q,alpha,beta,u,g,coverage,regime", one row per
// (node, group), node-major, floats printed with 12 significant digits.
// Returns the number of data rows.
long write_timeseries_csv(std::ostream& os, const GameModel& model, const StrategyProfile& Q,
                          const MultiplierPair& mult, const RegimeClassification& regimes);
long write_timeseries_csv(const std::filesystem::path& path, const GameModel& model,
                          const StrategyProfile& Q, const MultiplierPair& mult,
                          const RegimeClassification& regimes);

struct ImportedSolution {
  StrategyProfile strategy;
  MultiplierPair multipliers;
};

// Reads a CSV produced by write_timeseries_csv back into strategy and
// multiplier fields, checking the header, the row count, node times, group
// names, and box membership against the scenario. Throws IoError.
ImportedSolution read_timeseries_csv(std::istream& is, const Scenario& scenario);
ImportedSolution read_timeseries_csv(const std::filesystem::path& path, const Scenario& scenario);

// Human-readable interpretation report: per node and group the active
// multiplier case, plus the verification summary.
std::string write_report(const GameModel& model, const StrategyProfile& Q,
                         const MultiplierPair& mult, const RegimeClassification& regimes,
                         const DualityReport& report);

}  // namespace vaxeq
