#pragma once

#include <span>
#include <string>
#include <vector>

#include "function_spec.hpp"
#include "grid.hpp"

namespace vaxeq {

struct GroupSpec {
  std::string name;
  FunctionSpec epsilon;  // population share, in (0,1); shares sum to 1 at every node
  FunctionSpec r_v;      // morbidity probability from the vaccine, in [0,1]
  FunctionSpec r_inf;    // morbidity probability from infection, in (0,1]
};

// Perceived infection probability for a group. Either a fixed per-group curve
// c_i(t), or an affine response to the unvaccinated share:
//   pi_i(t, P) = a_i(t) + b_i(t) * (1 - p(t)),  b_i >= 0,
// where p(t) is the share-weighted vaccination coverage.
struct PiModel {
  enum class Kind { Constant, LinearCoverage };

  Kind kind = Kind::Constant;
  std::vector<FunctionSpec> c;  // Constant: one entry per group
  std::vector<FunctionSpec> a;  // LinearCoverage: one entry per group
  std::vector<FunctionSpec> b;  // LinearCoverage: one entry per group
};

// A k-group vaccination game on [0, horizon]. Group i's payoff at strategy
// vector P is
//   u_i(t, P) = -r_i(t) P_i - pi_i(t, P) (1 - P_i),
// with relative risk r_i = r_v / r_inf computed on the fly.
struct GameModel {
  double horizon = 1.0;
  std::vector<GroupSpec> groups;
  PiModel pi;

  int group_count() const { return static_cast<int>(groups.size()); }
  double relative_risk(int group, double t) const;
};

// Share-weighted coverage p(t) = sum_j eps_j(t) P_j. Throws DomainError when
// t is outside [0, horizon] or P is not k-dimensional.
double coverage(const GameModel& model, double t, std::span<const double> P);

std::vector<double> eval_pi(const GameModel& model, double t, std::span<const double> P);

std::vector<double> eval_payoff(const GameModel& model, double t, std::span<const double> P);

// Own-coordinate payoff derivatives du_i/dP_i. Constant pi: pi_i - r_i.
// Linear coverage: -r_i + pi_i(t,P) + b_i eps_i (1 - P_i).
std::vector<double> eval_grad(const GameModel& model, double t, std::span<const double> P);

struct ValidationReport {
  std::vector<std::string> issues;  // empty means valid
  // Largest affine-coefficient magnitude of grad u over grid nodes, the
  // explicit growth constant witnessing the Caratheodory-type bound (grad u
  // is affine in P for both pi families).
  double growth_constant = 0.0;
  // Largest row sum of |d(grad u)_i / dP_j| over grid nodes; used for the
  // default projection step.
  double lipschitz_bound = 0.0;
  // Structural: u_i is concave in P_i for both pi families, so the
  // pseudoconcavity requirement holds without a numeric check.
  bool pseudoconcave = true;

  bool ok() const { return issues.empty(); }
  std::string summary() const;
};

// Checks share sum, share range, risk ranges, and the pi range condition at
// every grid node (linear coverage: a >= 0, b >= 0, a + b <= 1).
ValidationReport validate_model(const GameModel& model, const TimeGrid& grid);

// Throws ValidationError when validate_model reports issues.
void require_valid(const GameModel& model, const TimeGrid& grid);

// Worst mismatch between eval_grad and a central difference of eval_payoff,
// measured as |fd - g| / max(1, |g|). The stencil is clamped to the box.
// Throws DomainError when step <= 0.
double fd_gradient_check(const GameModel& model, double t, std::span<const double> P, double step);

}  // namespace vaxeq
