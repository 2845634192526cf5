#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "model.hpp"

namespace vaxeq {

struct SolverParams {
  enum class Method { Extragradient, FixedPoint };

  Method method = Method::Extragradient;
  // Projection step. Must be positive when set; 0 selects 0.5/h with h the
  // model's validated Jacobian bound (clamped to [1e-3, 100]).
  double gamma = 0.0;
  int max_iters = 20000;
  double tol = 1e-10;  // natural-residual certification threshold
  // Cells per refinement pass of the best-response fallback scan.
  int oracle_fallback_resolution = 1000;
};

struct SliceDiagnostics {
  int iterations = 0;
  double residual = 0.0;
  bool fallback_used = false;
  double gamma = 0.0;  // step the certificate was measured with
};

// F = -grad u, the map whose box variational inequality characterizes the
// slice equilibria.
std::vector<double> vi_map(const GameModel& model, double t, std::span<const double> P);

// ||Q - proj_box(Q - gamma F(Q))||_inf; zero exactly at slice solutions.
double natural_residual(const GameModel& model, double t, std::span<const double> Q, double gamma);

// Step used when SolverParams.gamma is 0: half the reciprocal of the slice
// Jacobian bound at t, clamped to [1e-3, 100].
double default_gamma(const GameModel& model, double t);

struct SliceSolution {
  std::vector<double> strategy;
  SliceDiagnostics diagnostics;
};

// Solves the slice inequality at time t. Runs the configured projection method
// and, if it exhausts max_iters, a damped best-response refinement; the result
// is re-certified either way. Throws SolveError (carrying the best iterate)
// when no point reaches the tolerance. A zero-residual initial point is
// returned unchanged.
SliceSolution solve_slice(const GameModel& model, double t, std::span<const double> init,
                          const SolverParams& params);

struct ProfileSolution {
  StrategyProfile profile;
  std::vector<SliceDiagnostics> diagnostics;

  double max_residual() const;
  bool any_fallback() const;
};

// Solves every grid node. Sequential mode warm-starts each node from the
// previous solution; parallel mode solves nodes independently from the box
// midpoint. Slice failures are rethrown with the node index attached.
ProfileSolution solve_profile(const GameModel& model, const TimeGrid& grid,
                              const SolverParams& params, bool parallel = false);

// psi(P) = sum_n w_n <F(t_n, Q_n), P_n - Q_n>: the trapezoidal pairing of the
// inequality. Nonnegative for all box profiles P exactly when Q solves the
// discrete problem; psi(Q) = 0 identically.
double evi_value(const GameModel& model, const StrategyProfile& Q, const StrategyProfile& P);

struct PseudomonotonicityViolation {
  std::vector<double> p, q;
  double forward;   // <F(q), p - q>
  double backward;  // <F(p), p - q>
};

using VectorMap = std::function<std::vector<double>(std::span<const double>)>;

// Samples pairs in the box and reports Karamardian pseudomonotonicity
// violations: <F(q), p-q> >= 0 but <F(p), p-q> < -1e-12. Empty means no
// violation found (a diagnostic, not a proof).
std::vector<PseudomonotonicityViolation> scan_pseudomonotonicity(const VectorMap& F, int k,
                                                                 int n_pairs, std::uint64_t seed);

std::vector<PseudomonotonicityViolation> check_k_pseudomonotone(const GameModel& model, double t,
                                                                int n_pairs, std::uint64_t seed);

}  // namespace vaxeq
