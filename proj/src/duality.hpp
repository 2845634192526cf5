#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "evi_solver.hpp"

namespace vaxeq {

// Active-set membership of a strategy entry: at the lower bound, strictly
// interior, or at the upper bound.
enum class Regime { Minus, Zero, Plus };

const char* regime_label(Regime r);  // "E_minus" / "E_zero" / "E_plus"

struct RegimeClassification {
  TimeGrid grid;
  int k = 0;
  double tol_active = 1e-8;
  std::vector<Regime> regimes;  // node-major

  Regime at(int node, int group) const {
    return regimes[static_cast<std::size_t>(node) * k + group];
  }
};

// Q <= tol_active -> Minus, Q >= 1 - tol_active -> Plus, else Zero.
RegimeClassification classify_regimes(const StrategyProfile& Q, double tol_active = 1e-8);

// Nonnegative multiplier fields for the lower bound (alpha) and the upper
// bound (beta), node-major on the profile's grid.
struct MultiplierPair {
  TimeGrid grid;
  int k = 0;
  std::vector<double> alpha;
  std::vector<double> beta;

  MultiplierPair() = default;
  MultiplierPair(TimeGrid g, int groups);

  double alpha_at(int node, int group) const {
    return alpha[static_cast<std::size_t>(node) * k + group];
  }
  double beta_at(int node, int group) const {
    return beta[static_cast<std::size_t>(node) * k + group];
  }
};

struct SignConditionReport {
  bool pass = true;
  double worst_violation = 0.0;
  int worst_node = -1;
  int worst_group = -1;
  Regime worst_regime = Regime::Zero;

  std::string describe() const;
};

// With g = -du_i/dP_i at the candidate solution: g >= -tol where Q = 0,
// |g| <= sqrt(tol) on interior entries, g <= tol where Q = 1. The interior
// tolerance is loosened to sqrt(tol) because stationarity degrades with the
// square root of the residual near the bounds.
SignConditionReport check_sign_conditions(const GameModel& model, const StrategyProfile& Q,
                                          const RegimeClassification& regimes, double tol = 1e-10);

// alpha = max(g, 0) on lower-bound entries, beta = max(-g, 0) on upper-bound
// entries, exactly zero elsewhere (keeps complementarity exact and pushes all
// error into the stationarity residual). Throws ExtractionError when the sign
// conditions fail.
MultiplierPair extract_multipliers(const GameModel& model, const StrategyProfile& Q,
                                   const RegimeClassification& regimes, double tol = 1e-10);

// Max over entries of: negative parts of alpha and beta, |alpha Q|,
// |beta (Q - 1)|, and the stationarity defect |g - alpha + beta|.
double kkt_residual(const GameModel& model, const StrategyProfile& Q, const MultiplierPair& mult);

// max |alpha Q| and |beta (Q - 1)| over entries.
double complementarity_check(const StrategyProfile& Q, const MultiplierPair& mult);

// L(P, alpha, beta) = psi(P) - <<alpha, P>> + <<beta, P - 1>> with the
// trapezoidal pairing; psi is linearized at Q.
double lagrangian_value(const GameModel& model, const StrategyProfile& Q, const StrategyProfile& P,
                        const MultiplierPair& mult);

struct SaddleCheckResult {
  bool pass = true;
  int samples_passed = 0;
  double worst_violation = 0.0;
  std::string counterexample;  // empty when pass
};

// Samples n_samples box profiles P (minimizer side) and n_samples nonnegative
// multiplier pairs with entries in [0, 2] (maximizer side, zero pair always
// included); both saddle inequalities must hold within tol.
SaddleCheckResult saddle_point_check(const GameModel& model, const StrategyProfile& Q,
                                     const MultiplierPair& mult, int n_samples, std::uint64_t seed,
                                     double tol = 1e-8);

struct DualityGap {
  double primal = 0.0;
  double dual = 0.0;
  double gap = 0.0;
};

// Primal value psi(Q) and the closed-form dual: psi is linear in P over the
// whole space, so the inner infimum is finite only on the stationarity set
// alpha = g + beta, and the dual maximum is attained at beta* = max(-g, 0)
// with value -<<g, Q>> - <<beta*, 1>>.
DualityGap duality_gap(const GameModel& model, const StrategyProfile& Q);

// Enumeration cross-check of the dual value: per entry, scans the beta grid
// {0, step, 2 step, ...} up to max(-g, 0) + margin, keeping alpha pinned by
// stationarity and discarding infeasible points. Independent of the closed
// form above.
double dual_value_enumerated(const GameModel& model, const StrategyProfile& Q, double beta_step,
                             double beta_margin = 1.0);

struct VerifyOptions {
  std::uint64_t seed = 1;
  int evi_samples = 1000;
  int saddle_samples = 500;
  double kkt_tol = 1e-6;
  double complementarity_tol = 1e-8;
  double gap_tol = 1e-8;
  double saddle_tol = 1e-8;
  double evi_tol = 1e-8;           // psi(P) >= -evi_tol on sampled P
  double evi_identity_tol = 1e-10; // |psi(Q)| bound
  double sign_tol = 1e-10;         // solver certification tolerance
};

struct DualityReport {
  double kkt_residual = 0.0;
  double complementarity_residual = 0.0;
  DualityGap gap;
  SignConditionReport sign_conditions;
  SaddleCheckResult saddle;
  double evi_identity = 0.0;     // psi(Q)
  double evi_min_sampled = 0.0;  // min psi(P) over sampled P
  double max_natural_residual = 0.0;
  double lagrangian_at_solution = 0.0;
  bool evi_pass = true;
  bool residual_pass = true;
  bool pass = false;

  std::string summary() const;
};

// Runs every check against the pinned tolerances: KKT residual,
// complementarity, duality gap, sign conditions, saddle sampling, inequality
// sampling, and per-node natural-residual re-certification.
DualityReport verify_solution(const GameModel& model, const StrategyProfile& Q,
                              const MultiplierPair& mult, const SolverParams& solver,
                              const VerifyOptions& options = {});

}  // namespace vaxeq
