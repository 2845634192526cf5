#pragma once

#include <span>
#include <vector>

#include "model.hpp"

namespace vaxeq {

struct OracleParams {
  double resolution = 1e-3;       // own-coordinate grid step, in (0, 0.5]
  double improvement_tol = 1e-9;  // payoff gains below this do not count as deviations
  int max_sweeps = 64;
};

struct BestResponse {
  std::vector<double> maximizers;  // every grid point within improvement_tol of the best
  double best = 0.0;               // strict grid argmax (ties keep the leftmost point)
  double value = 0.0;
};

// Exhaustive payoff scan of unit's own coordinate over the grid, all other
// coordinates held at P. Deliberately gradient-free so it can catch modeling
// bugs in the analytic path.
BestResponse best_response(const GameModel& model, double t, int unit, std::span<const double> P,
                           const OracleParams& params);

struct NashCheck {
  bool pass = true;
  int worst_unit = -1;
  double best_gain = 0.0;  // largest payoff improvement any unit can secure
  double deviation = 0.0;  // the grid point achieving it
};

NashCheck nash_check(const GameModel& model, double t, std::span<const double> Q,
                     const OracleParams& params);

// Iterated best response on the grid, starting from the all-zeros slice, until
// a full sweep changes nothing. Restricted to k <= 3. Throws OracleError when
// the iteration cycles past max_sweeps.
std::vector<double> equilibrium_oracle(const GameModel& model, double t, const OracleParams& params);

}  // namespace vaxeq
