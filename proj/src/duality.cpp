#include "duality.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "errors.hpp"
#include "rng.hpp"

namespace vaxeq {

const char* regime_label(Regime r) {
  switch (r) {
    case Regime::Minus: return "E_minus";
    case Regime::Zero: return "E_zero";
    case Regime::Plus: return "E_plus";
  }
  return "?";
}

RegimeClassification classify_regimes(const StrategyProfile& Q, double tol_active) {
  if (!(tol_active > 0.0 && tol_active < 0.5)) throw DomainError("tol_active must lie in (0, 0.5)");
  if (!Q.in_box()) throw DomainError("profile leaves the box");
  RegimeClassification out;
  out.grid = Q.grid;
  out.k = Q.k;
  out.tol_active = tol_active;
  out.regimes.reserve(Q.values.size());
  for (double q : Q.values) {
    if (q <= tol_active)
      out.regimes.push_back(Regime::Minus);
    else if (q >= 1.0 - tol_active)
      out.regimes.push_back(Regime::Plus);
    else
      out.regimes.push_back(Regime::Zero);
  }
  return out;
}

MultiplierPair::MultiplierPair(TimeGrid g, int groups)
    : grid(g),
      k(groups),
      alpha(static_cast<std::size_t>(g.n_nodes) * groups, 0.0),
      beta(static_cast<std::size_t>(g.n_nodes) * groups, 0.0) {}

std::string SignConditionReport::describe() const {
  if (pass) return "sign conditions hold";
  std::ostringstream os;
  os << "sign condition violated on " << regime_label(worst_regime) << " at node " << worst_node
     << ", group " << worst_group << " (violation " << worst_violation << ")";
  return os.str();
}

SignConditionReport check_sign_conditions(const GameModel& model, const StrategyProfile& Q,
                                          const RegimeClassification& regimes, double tol) {
  if (!(Q.grid == regimes.grid) || Q.k != regimes.k)
    throw DomainError("classification does not match profile");
  SignConditionReport out;
  const double interior_tol = std::sqrt(tol);
  for (int n = 0; n < Q.grid.n_nodes; ++n) {
    const std::vector<double> g = vi_map(model, Q.grid.node(n), Q.slice(n));
    for (int i = 0; i < Q.k; ++i) {
      const double gi = g[static_cast<std::size_t>(i)];
      double violation = 0.0;
      switch (regimes.at(n, i)) {
        case Regime::Minus: violation = -gi - tol; break;
        case Regime::Zero: violation = std::abs(gi) - interior_tol; break;
        case Regime::Plus: violation = gi - tol; break;
      }
      if (violation > out.worst_violation) {
        out.worst_violation = violation;
        out.worst_node = n;
        out.worst_group = i;
        out.worst_regime = regimes.at(n, i);
        out.pass = false;
      }
    }
  }
  return out;
}

MultiplierPair extract_multipliers(const GameModel& model, const StrategyProfile& Q,
                                   const RegimeClassification& regimes, double tol) {
  const SignConditionReport sign = check_sign_conditions(model, Q, regimes, tol);
  if (!sign.pass)
    throw ExtractionError("multiplier extraction refused: " + sign.describe());

  MultiplierPair mult(Q.grid, Q.k);
  for (int n = 0; n < Q.grid.n_nodes; ++n) {
    const std::vector<double> g = vi_map(model, Q.grid.node(n), Q.slice(n));
    for (int i = 0; i < Q.k; ++i) {
      const std::size_t idx = static_cast<std::size_t>(n) * Q.k + i;
      const double gi = g[static_cast<std::size_t>(i)];
      switch (regimes.at(n, i)) {
        case Regime::Minus: mult.alpha[idx] = std::max(gi, 0.0); break;
        case Regime::Plus: mult.beta[idx] = std::max(-gi, 0.0); break;
        case Regime::Zero: break;  // exactly zero on interior entries
      }
    }
  }
  return mult;
}

double kkt_residual(const GameModel& model, const StrategyProfile& Q, const MultiplierPair& mult) {
  if (!(Q.grid == mult.grid) || Q.k != mult.k) throw DomainError("multipliers do not match profile");
  double worst = 0.0;
  for (int n = 0; n < Q.grid.n_nodes; ++n) {
    const std::vector<double> g = vi_map(model, Q.grid.node(n), Q.slice(n));
    for (int i = 0; i < Q.k; ++i) {
      const std::size_t idx = static_cast<std::size_t>(n) * Q.k + i;
      const double a = mult.alpha[idx];
      const double b = mult.beta[idx];
      const double q = Q.at(n, i);
      worst = std::max(worst, std::max(-a, 0.0));
      worst = std::max(worst, std::max(-b, 0.0));
      worst = std::max(worst, std::abs(a * q));
      worst = std::max(worst, std::abs(b * (q - 1.0)));
      worst = std::max(worst, std::abs(g[static_cast<std::size_t>(i)] - a + b));
    }
  }
  return worst;
}

double complementarity_check(const StrategyProfile& Q, const MultiplierPair& mult) {
  if (!(Q.grid == mult.grid) || Q.k != mult.k) throw DomainError("multipliers do not match profile");
  double worst = 0.0;
  for (std::size_t idx = 0; idx < Q.values.size(); ++idx) {
    worst = std::max(worst, std::abs(mult.alpha[idx] * Q.values[idx]));
    worst = std::max(worst, std::abs(mult.beta[idx] * (Q.values[idx] - 1.0)));
  }
  return worst;
}

double lagrangian_value(const GameModel& model, const StrategyProfile& Q, const StrategyProfile& P,
                        const MultiplierPair& mult) {
  Q.require_same_shape(P);
  if (!(Q.grid == mult.grid) || Q.k != mult.k) throw DomainError("multipliers do not match profile");
  double value = evi_value(model, Q, P);
  for (int n = 0; n < Q.grid.n_nodes; ++n) {
    const double w = Q.grid.weight(n);
    for (int i = 0; i < Q.k; ++i) {
      const std::size_t idx = static_cast<std::size_t>(n) * Q.k + i;
      value -= w * mult.alpha[idx] * P.at(n, i);
      value += w * mult.beta[idx] * (P.at(n, i) - 1.0);
    }
  }
  return value;
}

SaddleCheckResult saddle_point_check(const GameModel& model, const StrategyProfile& Q,
                                     const MultiplierPair& mult, int n_samples, std::uint64_t seed,
                                     double tol) {
  SaddleCheckResult out;
  Rng rng(seed);
  const double pivot = lagrangian_value(model, Q, Q, mult);

  // Minimizer side: L(P, mult) >= L(Q, mult) for box profiles P.
  StrategyProfile P(Q.grid, Q.k);
  for (int s = 0; s < n_samples && out.pass; ++s) {
    for (double& v : P.values) v = rng.uniform01();
    const double value = lagrangian_value(model, Q, P, mult);
    const double violation = pivot - value;
    out.worst_violation = std::max(out.worst_violation, violation);
    if (violation > tol) {
      out.pass = false;
      std::ostringstream os;
      os << "strategy sample " << s << ": L(P)=" << value << " < L(Q)=" << pivot;
      out.counterexample = os.str();
      break;
    }
    ++out.samples_passed;
  }

  // Maximizer side: L(Q, alpha, beta) <= L(Q, mult) over nonnegative pairs;
  // the zero pair is always included (it witnesses corrupted multipliers).
  MultiplierPair probe(Q.grid, Q.k);
  for (int s = 0; s < n_samples && out.pass; ++s) {
    if (s > 0)
      for (std::size_t idx = 0; idx < probe.alpha.size(); ++idx) {
        probe.alpha[idx] = rng.uniform(0.0, 2.0);
        probe.beta[idx] = rng.uniform(0.0, 2.0);
      }
    const double value = lagrangian_value(model, Q, Q, probe);
    const double violation = value - pivot;
    out.worst_violation = std::max(out.worst_violation, violation);
    if (violation > tol) {
      out.pass = false;
      std::ostringstream os;
      os << "multiplier sample " << s << ": L(Q,a,b)=" << value << " > L(Q)=" << pivot;
      out.counterexample = os.str();
      break;
    }
    ++out.samples_passed;
  }
  return out;
}

DualityGap duality_gap(const GameModel& model, const StrategyProfile& Q) {
  DualityGap out;
  out.primal = evi_value(model, Q, Q);
  double dual = 0.0;
  for (int n = 0; n < Q.grid.n_nodes; ++n) {
    const std::vector<double> g = vi_map(model, Q.grid.node(n), Q.slice(n));
    const double w = Q.grid.weight(n);
    for (int i = 0; i < Q.k; ++i) {
      const double gi = g[static_cast<std::size_t>(i)];
      dual += w * (-gi * Q.at(n, i) - std::max(-gi, 0.0));
    }
  }
  out.dual = dual;
  out.gap = std::abs(out.primal - out.dual);
  return out;
}

double dual_value_enumerated(const GameModel& model, const StrategyProfile& Q, double beta_step,
                             double beta_margin) {
  if (!(beta_step > 0.0)) throw DomainError("beta_step must be positive");
  double dual = 0.0;
  for (int n = 0; n < Q.grid.n_nodes; ++n) {
    const std::vector<double> g = vi_map(model, Q.grid.node(n), Q.slice(n));
    const double w = Q.grid.weight(n);
    for (int i = 0; i < Q.k; ++i) {
      const double gi = g[static_cast<std::size_t>(i)];
      const double q = Q.at(n, i);
      const double beta_max = std::max(-gi, 0.0) + beta_margin;
      const long cells = static_cast<long>(std::ceil(beta_max / beta_step));
      double best = -std::numeric_limits<double>::infinity();
      for (long j = 0; j <= cells; ++j) {
        const double beta = static_cast<double>(j) * beta_step;
        if (gi + beta < 0.0) continue;  // alpha = g + beta must stay nonnegative
        best = std::max(best, -gi * q - beta);
      }
      dual += w * best;
    }
  }
  return dual;
}

std::string DualityReport::summary() const {
  std::ostringstream os;
  os << (pass ? "verification passed\n" : "verification FAILED\n");
  os << "  kkt residual            " << kkt_residual << "\n";
  os << "  complementarity         " << complementarity_residual << "\n";
  os << "  duality gap             " << gap.gap << " (primal " << gap.primal << ", dual " << gap.dual
     << ")\n";
  os << "  sign conditions         " << (sign_conditions.pass ? "pass" : sign_conditions.describe())
     << "\n";
  os << "  saddle point            " << (saddle.pass ? "pass" : saddle.counterexample) << " ("
     << saddle.samples_passed << " samples)\n";
  os << "  inequality sampling     min psi(P) = " << evi_min_sampled << ", psi(Q) = " << evi_identity
     << "\n";
  os << "  natural residual        " << max_natural_residual << "\n";
  os << "  lagrangian at solution  " << lagrangian_at_solution << "\n";
  return os.str();
}

DualityReport verify_solution(const GameModel& model, const StrategyProfile& Q,
                              const MultiplierPair& mult, const SolverParams& solver,
                              const VerifyOptions& options) {
  DualityReport report;
  const RegimeClassification regimes = classify_regimes(Q);

  report.kkt_residual = kkt_residual(model, Q, mult);
  report.complementarity_residual = complementarity_check(Q, mult);
  report.gap = duality_gap(model, Q);
  report.sign_conditions = check_sign_conditions(model, Q, regimes, options.sign_tol);
  report.saddle = saddle_point_check(model, Q, mult, options.saddle_samples, options.seed,
                                     options.saddle_tol);
  report.lagrangian_at_solution = lagrangian_value(model, Q, Q, mult);

  report.evi_identity = evi_value(model, Q, Q);
  Rng rng(options.seed ^ 0x5eed5eed5eed5eedull);
  StrategyProfile P(Q.grid, Q.k);
  double min_psi = 0.0;
  for (int s = 0; s < options.evi_samples; ++s) {
    for (double& v : P.values) v = rng.uniform01();
    min_psi = std::min(min_psi, evi_value(model, Q, P));
  }
  report.evi_min_sampled = min_psi;
  report.evi_pass =
      min_psi >= -options.evi_tol && std::abs(report.evi_identity) <= options.evi_identity_tol;

  double max_res = 0.0;
  for (int n = 0; n < Q.grid.n_nodes; ++n) {
    const double t = Q.grid.node(n);
    const double gamma = solver.gamma > 0.0 ? solver.gamma : default_gamma(model, t);
    max_res = std::max(max_res, natural_residual(model, t, Q.slice(n), gamma));
  }
  report.max_natural_residual = max_res;
  report.residual_pass = max_res <= solver.tol;

  report.pass = report.kkt_residual <= options.kkt_tol &&
                report.complementarity_residual <= options.complementarity_tol &&
                report.gap.gap <= options.gap_tol && report.sign_conditions.pass &&
                report.saddle.pass && report.evi_pass && report.residual_pass;
  return report;
}

}  // namespace vaxeq
