#include "evi_solver.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <future>
#include <limits>
#include <sstream>
#include <thread>

#include "errors.hpp"
#include "rng.hpp"

namespace vaxeq {

namespace {

double clamp01(double x) { return std::min(1.0, std::max(0.0, x)); }

void check_params(const SolverParams& params) {
  if (params.gamma < 0.0) throw DomainError("solver gamma must be positive (or 0 for automatic)");
  if (!(params.tol > 0.0)) throw DomainError("solver tol must be positive");
  if (params.max_iters < 1) throw DomainError("solver max_iters must be at least 1");
  if (params.oracle_fallback_resolution < 2)
    throw DomainError("oracle_fallback_resolution must be at least 2");
}

// Row-sum bound of the slice Jacobian of F = -grad u at time t. Shares sum to
// one, so each row is bounded by b_i (1 + eps_i). Zero for constant pi.
double jacobian_bound_at(const GameModel& model, double t) {
  if (model.pi.kind != PiModel::Kind::LinearCoverage) return 0.0;
  double L = 0.0;
  for (int i = 0; i < model.group_count(); ++i) {
    const auto ui = static_cast<std::size_t>(i);
    L = std::max(L, model.pi.b[ui](t) * (1.0 + model.groups[ui].epsilon(t)));
  }
  return L;
}

// Own-coordinate payoff maximizer by progressive bracket refinement: each pass
// scans `cells` points of the current bracket and zooms to the argmax
// neighborhood. Payoffs are concave in the own coordinate, so the bracket
// always contains a maximizer. Ties keep the leftmost point.
double refine_best_response(const GameModel& model, double t, int unit, std::vector<double>& work,
                            int cells) {
  const auto uu = static_cast<std::size_t>(unit);
  const double keep = work[uu];
  double lo = 0.0, hi = 1.0;
  double best_x = keep;
  for (int pass = 0; pass < 12; ++pass) {
    const double step = (hi - lo) / cells;
    double best_u = -std::numeric_limits<double>::infinity();
    for (int j = 0; j <= cells; ++j) {
      const double x = (j == cells) ? hi : lo + step * j;
      work[uu] = x;
      const double u = eval_payoff(model, t, work)[uu];
      if (u > best_u) {
        best_u = u;
        best_x = x;
      }
    }
    lo = std::max(0.0, best_x - step);
    hi = std::min(1.0, best_x + step);
    if (step < 1e-14) break;
  }
  work[uu] = keep;
  return best_x;
}

// Own-coordinate response from the slope: F_i is nondecreasing in P_i (the
// payoff is concave there), so the response is a bound when the slope keeps
// one sign and the bisection root otherwise. This is the polish phase: payoff
// comparisons cannot localize an interior optimum beyond ~sqrt(ulp), which is
// coarser than the certification tolerance.
double slope_best_response(const GameModel& model, double t, int unit, std::vector<double>& work) {
  const auto uu = static_cast<std::size_t>(unit);
  const double keep = work[uu];
  work[uu] = 0.0;
  const double f_lo = vi_map(model, t, work)[uu];
  work[uu] = 1.0;
  const double f_hi = vi_map(model, t, work)[uu];
  work[uu] = keep;
  if (f_lo >= 0.0) return 0.0;
  if (f_hi <= 0.0) return 1.0;
  double lo = 0.0, hi = 1.0;
  for (int iter = 0; iter < 60 && hi - lo > 1e-16; ++iter) {
    const double mid = 0.5 * (lo + hi);
    work[uu] = mid;
    const double f = vi_map(model, t, work)[uu];
    (f < 0.0 ? lo : hi) = mid;
  }
  work[uu] = keep;
  return 0.5 * (lo + hi);
}

// Damped Gauss-Seidel best-response sweeps: a payoff-scan zoom pass localizes
// the responses, then slope bisection polishes them to full precision. The
// coupled game has strategic substitutes (cross effects of grad u are
// nonpositive), where undamped sweeps can oscillate for k >= 3;
// theta = 4/(k+2) keeps the sweep spectrum inside the unit disk for the
// affine slice maps.
std::vector<double> fallback_best_response(const GameModel& model, double t,
                                           std::span<const double> init, const SolverParams& params) {
  const int k = model.group_count();
  std::vector<double> P(init.begin(), init.end());
  const double theta0 = std::min(1.0, 4.0 / (k + 2));
  for (int phase = 0; phase < 2; ++phase) {
    double theta = theta0;
    const int max_sweeps = 400;
    for (int sweep = 0; sweep < max_sweeps; ++sweep) {
      double move = 0.0;
      for (int i = 0; i < k; ++i) {
        const double target =
            phase == 0 ? refine_best_response(model, t, i, P, params.oracle_fallback_resolution)
                       : slope_best_response(model, t, i, P);
        const auto ui = static_cast<std::size_t>(i);
        const double delta = target - P[ui];
        P[ui] = clamp01(P[ui] + theta * delta);
        move = std::max(move, std::abs(delta));
      }
      if (move < (phase == 0 ? 1e-7 : 1e-15)) break;
      if (sweep == max_sweeps / 2) theta *= 0.5;
    }
  }
  // Snap essentially-active coordinates so complementarity is exact.
  for (double& x : P) {
    if (x <= 1e-11) x = 0.0;
    if (x >= 1.0 - 1e-11) x = 1.0;
  }
  return P;
}

}  // namespace

std::vector<double> vi_map(const GameModel& model, double t, std::span<const double> P) {
  std::vector<double> F = eval_grad(model, t, P);
  for (double& v : F) v = -v;
  return F;
}

double natural_residual(const GameModel& model, double t, std::span<const double> Q, double gamma) {
  if (!(gamma > 0.0)) throw DomainError("natural residual needs a positive gamma");
  const std::vector<double> F = vi_map(model, t, Q);
  double res = 0.0;
  for (std::size_t i = 0; i < F.size(); ++i)
    res = std::max(res, std::abs(Q[i] - clamp01(Q[i] - gamma * F[i])));
  return res;
}

double default_gamma(const GameModel& model, double t) {
  return std::clamp(0.5 / std::max(jacobian_bound_at(model, t), 1e-12), 1e-3, 100.0);
}

SliceSolution solve_slice(const GameModel& model, double t, std::span<const double> init,
                          const SolverParams& params) {
  check_params(params);
  const int k = model.group_count();
  if (static_cast<int>(init.size()) != k) throw DomainError("init size does not match group count");

  const double gamma_cert = params.gamma > 0.0 ? params.gamma : default_gamma(model, t);

  SliceSolution out;
  out.diagnostics.gamma = gamma_cert;
  std::vector<double> Q(init.begin(), init.end());
  for (double& x : Q) x = clamp01(x);

  double res = natural_residual(model, t, Q, gamma_cert);
  std::vector<double> best = Q;
  double best_res = res;

  // A certified initial point is returned as is: on degenerate slices every
  // point solves, and the solver must not move off one.
  if (res <= params.tol) {
    out.strategy = std::move(Q);
    out.diagnostics.residual = res;
    return out;
  }

  double gamma = gamma_cert;
  double prev_res = res;
  int nonmonotone = 0;
  std::vector<double> mid(static_cast<std::size_t>(k));
  int iters = 0;
  for (; iters < params.max_iters && res > params.tol; ++iters) {
    if (params.method == SolverParams::Method::Extragradient) {
      const std::vector<double> Fq = vi_map(model, t, Q);
      for (int i = 0; i < k; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        mid[ui] = clamp01(Q[ui] - gamma * Fq[ui]);
      }
      const std::vector<double> Fm = vi_map(model, t, mid);
      for (int i = 0; i < k; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        Q[ui] = clamp01(Q[ui] - gamma * Fm[ui]);
      }
    } else {
      const std::vector<double> Fq = vi_map(model, t, Q);
      for (int i = 0; i < k; ++i) {
        const auto ui = static_cast<std::size_t>(i);
        Q[ui] = clamp01(Q[ui] - gamma * Fq[ui]);
      }
    }
    res = natural_residual(model, t, Q, gamma_cert);
    if (res < best_res) {
      best_res = res;
      best = Q;
    }
    if (res >= prev_res) {
      if (++nonmonotone >= 3) {
        gamma = std::max(gamma * 0.5, gamma_cert * 1e-4);
        nonmonotone = 0;
      }
    } else {
      nonmonotone = 0;
    }
    prev_res = res;
  }
  out.diagnostics.iterations = iters;

  if (res <= params.tol) {
    out.strategy = std::move(Q);
    out.diagnostics.residual = res;
    return out;
  }

  std::vector<double> fb = fallback_best_response(model, t, best, params);
  const double fb_res = natural_residual(model, t, fb, gamma_cert);
  out.diagnostics.fallback_used = true;
  if (fb_res <= params.tol) {
    out.strategy = std::move(fb);
    out.diagnostics.residual = fb_res;
    return out;
  }

  const bool fb_better = fb_res < best_res;
  std::ostringstream os;
  os << "no certified solution at t=" << t << ": residual " << std::min(fb_res, best_res)
     << " > tol " << params.tol << " after " << iters << " iterations and fallback";
  throw SolveError(os.str(), fb_better ? fb : best, fb_better ? fb_res : best_res);
}

double ProfileSolution::max_residual() const {
  double r = 0.0;
  for (const auto& d : diagnostics) r = std::max(r, d.residual);
  return r;
}

bool ProfileSolution::any_fallback() const {
  for (const auto& d : diagnostics)
    if (d.fallback_used) return true;
  return false;
}

ProfileSolution solve_profile(const GameModel& model, const TimeGrid& grid,
                              const SolverParams& params, bool parallel) {
  check_params(params);
  require_valid(model, grid);
  const int k = model.group_count();

  ProfileSolution out;
  out.profile = StrategyProfile(grid, k, 0.0);
  out.diagnostics.resize(static_cast<std::size_t>(grid.n_nodes));

  auto solve_node = [&](int n, std::span<const double> init) {
    try {
      SliceSolution s = solve_slice(model, grid.node(n), init, params);
      std::copy(s.strategy.begin(), s.strategy.end(), out.profile.slice(n).begin());
      out.diagnostics[static_cast<std::size_t>(n)] = s.diagnostics;
    } catch (const SolveError& e) {
      std::ostringstream os;
      os << "node " << n << ": " << e.what();
      throw SolveError(os.str(), e.best_iterate(), e.residual());
    }
  };

  if (!parallel) {
    std::vector<double> warm(static_cast<std::size_t>(k), 0.5);
    for (int n = 0; n < grid.n_nodes; ++n) {
      solve_node(n, warm);
      const auto s = out.profile.slice(n);
      warm.assign(s.begin(), s.end());
    }
    return out;
  }

  const std::vector<double> midpoint(static_cast<std::size_t>(k), 0.5);
  const unsigned workers = std::max(1u, std::thread::hardware_concurrency());
  std::vector<std::future<void>> futures;
  futures.reserve(workers);
  std::atomic<int> next{0};
  for (unsigned w = 0; w < workers; ++w) {
    futures.push_back(std::async(std::launch::async, [&]() {
      for (int n = next.fetch_add(1); n < grid.n_nodes; n = next.fetch_add(1))
        solve_node(n, midpoint);
    }));
  }
  std::exception_ptr first_error;
  for (auto& f : futures) {
    try {
      f.get();
    } catch (...) {
      if (!first_error) first_error = std::current_exception();
    }
  }
  if (first_error) std::rethrow_exception(first_error);
  return out;
}

double evi_value(const GameModel& model, const StrategyProfile& Q, const StrategyProfile& P) {
  Q.require_same_shape(P);
  if (Q.k != model.group_count()) throw DomainError("profile group count does not match model");
  double total = 0.0;
  for (int n = 0; n < Q.grid.n_nodes; ++n) {
    const std::vector<double> F = vi_map(model, Q.grid.node(n), Q.slice(n));
    double inner = 0.0;
    for (int i = 0; i < Q.k; ++i)
      inner += F[static_cast<std::size_t>(i)] * (P.at(n, i) - Q.at(n, i));
    total += Q.grid.weight(n) * inner;
  }
  return total;
}

std::vector<PseudomonotonicityViolation> scan_pseudomonotonicity(const VectorMap& F, int k,
                                                                 int n_pairs, std::uint64_t seed) {
  if (k < 1) throw DomainError("map dimension must be positive");
  Rng rng(seed);
  std::vector<PseudomonotonicityViolation> violations;
  std::vector<double> p(static_cast<std::size_t>(k)), q(static_cast<std::size_t>(k));
  for (int s = 0; s < n_pairs; ++s) {
    for (int i = 0; i < k; ++i) {
      p[static_cast<std::size_t>(i)] = rng.uniform01();
      q[static_cast<std::size_t>(i)] = rng.uniform01();
    }
    const std::vector<double> Fq = F(q);
    double forward = 0.0;
    for (int i = 0; i < k; ++i)
      forward += Fq[static_cast<std::size_t>(i)] *
                 (p[static_cast<std::size_t>(i)] - q[static_cast<std::size_t>(i)]);
    if (forward < 0.0) continue;
    const std::vector<double> Fp = F(p);
    double backward = 0.0;
    for (int i = 0; i < k; ++i)
      backward += Fp[static_cast<std::size_t>(i)] *
                  (p[static_cast<std::size_t>(i)] - q[static_cast<std::size_t>(i)]);
    if (backward < -1e-12) violations.push_back({p, q, forward, backward});
  }
  return violations;
}

std::vector<PseudomonotonicityViolation> check_k_pseudomonotone(const GameModel& model, double t,
                                                                int n_pairs, std::uint64_t seed) {
  VectorMap F = [&model, t](std::span<const double> P) { return vi_map(model, t, P); };
  return scan_pseudomonotonicity(F, model.group_count(), n_pairs, seed);
}

}  // namespace vaxeq
