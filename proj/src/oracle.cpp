#include "oracle.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include "errors.hpp"

namespace vaxeq {

namespace {

void check_params(const OracleParams& params) {
  if (!(params.resolution > 0.0 && params.resolution <= 0.5))
    throw DomainError("oracle resolution must lie in (0, 0.5]");
  if (!(params.improvement_tol > 0.0)) throw DomainError("improvement_tol must be positive");
}

int grid_cells(double resolution) {
  return static_cast<int>(std::ceil(1.0 / resolution - 1e-9));
}

}  // namespace

BestResponse best_response(const GameModel& model, double t, int unit, std::span<const double> P,
                           const OracleParams& params) {
  check_params(params);
  if (unit < 0 || unit >= model.group_count()) throw DomainError("unit index out of range");

  const int m = grid_cells(params.resolution);
  std::vector<double> work(P.begin(), P.end());
  const auto uu = static_cast<std::size_t>(unit);

  double best = -std::numeric_limits<double>::infinity();
  int best_j = 0;
  std::vector<double> values(static_cast<std::size_t>(m) + 1);
  for (int j = 0; j <= m; ++j) {
    work[uu] = static_cast<double>(j) / static_cast<double>(m);
    const double u = eval_payoff(model, t, work)[uu];
    values[static_cast<std::size_t>(j)] = u;
    if (u > best) {
      best = u;
      best_j = j;
    }
  }

  BestResponse out;
  out.value = best;
  out.best = static_cast<double>(best_j) / static_cast<double>(m);
  for (int j = 0; j <= m; ++j)
    if (values[static_cast<std::size_t>(j)] >= best - params.improvement_tol)
      out.maximizers.push_back(static_cast<double>(j) / static_cast<double>(m));
  return out;
}

NashCheck nash_check(const GameModel& model, double t, std::span<const double> Q,
                     const OracleParams& params) {
  NashCheck out;
  for (int i = 0; i < model.group_count(); ++i) {
    const double current = eval_payoff(model, t, Q)[static_cast<std::size_t>(i)];
    const BestResponse br = best_response(model, t, i, Q, params);
    const double gain = br.value - current;
    if (gain > out.best_gain) {
      out.best_gain = gain;
      out.worst_unit = i;
      out.deviation = br.best;
    }
  }
  out.pass = out.best_gain <= params.improvement_tol;
  return out;
}

std::vector<double> equilibrium_oracle(const GameModel& model, double t, const OracleParams& params) {
  check_params(params);
  const int k = model.group_count();
  if (k > 3) throw DomainError("fixed-point oracle is restricted to k <= 3");

  std::vector<double> P(static_cast<std::size_t>(k), 0.0);
  for (int sweep = 0; sweep < params.max_sweeps; ++sweep) {
    bool changed = false;
    for (int i = 0; i < k; ++i) {
      const BestResponse br = best_response(model, t, i, P, params);
      const double target = br.best;  // deterministic tie-break
      auto& cur = P[static_cast<std::size_t>(i)];
      // Grid points are exact, so stay put when the current point is already a
      // maximizer (indifference must not force movement).
      bool current_is_max = false;
      for (double x : br.maximizers)
        if (x == cur) {
          current_is_max = true;
          break;
        }
      if (!current_is_max && target != cur) {
        cur = target;
        changed = true;
      }
    }
    if (!changed) {
      const NashCheck check = nash_check(model, t, P, params);
      if (check.pass) return P;
      std::ostringstream os;
      os << "best-response fixed point is not an equilibrium (unit " << check.worst_unit
         << " gains " << check.best_gain << ")";
      throw OracleError(os.str());
    }
  }
  throw OracleError("best-response iteration did not settle (possible cycling)");
}

}  // namespace vaxeq
