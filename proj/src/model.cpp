#include "model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "errors.hpp"

namespace vaxeq {

namespace {

void require_shape(const GameModel& model, double t, std::span<const double> P) {
  if (model.groups.empty()) throw DomainError("model has no groups");
  if (static_cast<int>(P.size()) != model.group_count())
    throw DomainError("strategy vector size does not match group count");
  if (!(t >= 0.0 && t <= model.horizon)) throw DomainError("time outside [0, horizon]");
}

}  // namespace

double GameModel::relative_risk(int group, double t) const {
  const GroupSpec& g = groups[static_cast<std::size_t>(group)];
  return g.r_v(t) / g.r_inf(t);
}

double coverage(const GameModel& model, double t, std::span<const double> P) {
  require_shape(model, t, P);
  double p = 0.0;
  for (int i = 0; i < model.group_count(); ++i)
    p += model.groups[static_cast<std::size_t>(i)].epsilon(t) * P[static_cast<std::size_t>(i)];
  return p;
}

std::vector<double> eval_pi(const GameModel& model, double t, std::span<const double> P) {
  require_shape(model, t, P);
  const int k = model.group_count();
  std::vector<double> out(static_cast<std::size_t>(k));
  if (model.pi.kind == PiModel::Kind::Constant) {
    for (int i = 0; i < k; ++i) out[static_cast<std::size_t>(i)] = model.pi.c[static_cast<std::size_t>(i)](t);
  } else {
    const double unvaccinated = 1.0 - coverage(model, t, P);
    for (int i = 0; i < k; ++i)
      out[static_cast<std::size_t>(i)] =
          model.pi.a[static_cast<std::size_t>(i)](t) + model.pi.b[static_cast<std::size_t>(i)](t) * unvaccinated;
  }
  return out;
}

std::vector<double> eval_payoff(const GameModel& model, double t, std::span<const double> P) {
  const std::vector<double> pi = eval_pi(model, t, P);
  const int k = model.group_count();
  std::vector<double> u(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    u[ui] = -model.relative_risk(i, t) * P[ui] - pi[ui] * (1.0 - P[ui]);
  }
  return u;
}

std::vector<double> eval_grad(const GameModel& model, double t, std::span<const double> P) {
  const std::vector<double> pi = eval_pi(model, t, P);
  const int k = model.group_count();
  std::vector<double> g(static_cast<std::size_t>(k));
  for (int i = 0; i < k; ++i) {
    const auto ui = static_cast<std::size_t>(i);
    g[ui] = pi[ui] - model.relative_risk(i, t);
    if (model.pi.kind == PiModel::Kind::LinearCoverage)
      g[ui] += model.pi.b[ui](t) * model.groups[ui].epsilon(t) * (1.0 - P[ui]);
  }
  return g;
}

std::string ValidationReport::summary() const {
  std::ostringstream os;
  if (ok()) {
    os << "model valid; growth constant " << growth_constant << ", lipschitz bound " << lipschitz_bound
       << "; payoffs concave in the own coordinate (pseudoconcavity holds structurally)";
  } else {
    os << issues.size() << " validation issue(s):";
    for (const auto& s : issues) os << "\n  - " << s;
  }
  return os.str();
}

ValidationReport validate_model(const GameModel& model, const TimeGrid& grid) {
  ValidationReport report;
  auto fail = [&report](const std::string& msg) { report.issues.push_back(msg); };

  const int k = model.group_count();
  if (k < 1) {
    fail("model must have at least one group");
    return report;
  }
  if (!(model.horizon > 0.0) || !std::isfinite(model.horizon)) fail("horizon must be positive and finite");
  if (grid.horizon != model.horizon) fail("grid horizon differs from model horizon");

  try {
    for (const GroupSpec& g : model.groups) {
      g.epsilon.validate(model.horizon);
      g.r_v.validate(model.horizon);
      g.r_inf.validate(model.horizon);
    }
    if (model.pi.kind == PiModel::Kind::Constant) {
      if (static_cast<int>(model.pi.c.size()) != k) fail("pi_model needs one c entry per group");
      for (const auto& f : model.pi.c) f.validate(model.horizon);
    } else {
      if (static_cast<int>(model.pi.a.size()) != k || static_cast<int>(model.pi.b.size()) != k)
        fail("pi_model needs one a and one b entry per group");
      for (const auto& f : model.pi.a) f.validate(model.horizon);
      for (const auto& f : model.pi.b) f.validate(model.horizon);
    }
  } catch (const ScenarioError& e) {
    fail(std::string("malformed function spec: ") + e.what());
  }
  if (!report.ok()) return report;

  for (int n = 0; n < grid.n_nodes; ++n) {
    const double t = grid.node(n);
    double share_sum = 0.0;
    for (int i = 0; i < k; ++i) {
      const GroupSpec& g = model.groups[static_cast<std::size_t>(i)];
      const double eps = g.epsilon(t);
      share_sum += eps;
      std::ostringstream where;
      where << "group " << g.name << " at node " << n << " (t=" << t << ")";
      // (0,1] rather than (0,1): a one-group game forces eps = 1 through the
      // simplex condition; with k >= 2 the sum check keeps every share < 1.
      if (!(eps > 0.0 && eps <= 1.0)) fail("proportion outside (0,1] for " + where.str());
      const double rv = g.r_v(t);
      const double rinf = g.r_inf(t);
      if (!(rv >= 0.0 && rv <= 1.0)) fail("r_v outside [0,1] for " + where.str());
      if (!(rinf > 0.0 && rinf <= 1.0)) fail("r_inf outside (0,1] for " + where.str());
      if (model.pi.kind == PiModel::Kind::Constant) {
        const double c = model.pi.c[static_cast<std::size_t>(i)](t);
        if (!(c >= 0.0 && c <= 1.0)) fail("pi outside [0,1] for " + where.str());
      } else {
        const double a = model.pi.a[static_cast<std::size_t>(i)](t);
        const double b = model.pi.b[static_cast<std::size_t>(i)](t);
        if (b < 0.0) fail("pi slope b negative for " + where.str());
        if (a < 0.0) fail("pi offset a negative for " + where.str());
        if (a + b > 1.0) fail("pi exceeds 1 at zero coverage for " + where.str());
      }
    }
    if (std::abs(share_sum - 1.0) > 1e-9) {
      std::ostringstream os;
      os << "proportions sum " << share_sum << " != 1 at node " << n << " (t=" << t << ")";
      fail(os.str());
    }
  }
  if (!report.ok()) return report;

  // grad u is affine in P: record the largest coefficient magnitude (growth
  // constant) and the largest Jacobian row sum (step-size bound).
  for (int n = 0; n < grid.n_nodes; ++n) {
    const double t = grid.node(n);
    for (int i = 0; i < k; ++i) {
      const auto ui = static_cast<std::size_t>(i);
      const double r = model.relative_risk(i, t);
      double constant_term = 0.0;
      double row_sum = 0.0;
      double coef_max = 0.0;
      if (model.pi.kind == PiModel::Kind::Constant) {
        constant_term = model.pi.c[ui](t) - r;
      } else {
        const double a = model.pi.a[ui](t);
        const double b = model.pi.b[ui](t);
        const double eps_i = model.groups[ui].epsilon(t);
        constant_term = -r + a + b + b * eps_i;
        for (int j = 0; j < k; ++j) {
          const double eps_j = model.groups[static_cast<std::size_t>(j)].epsilon(t);
          const double coef = b * eps_j + (i == j ? b * eps_i : 0.0);
          coef_max = std::max(coef_max, std::abs(coef));
          row_sum += std::abs(coef);
        }
      }
      if (!std::isfinite(constant_term) || !std::isfinite(row_sum)) {
        fail("non-finite gradient coefficients");
        return report;
      }
      report.growth_constant = std::max({report.growth_constant, std::abs(constant_term), coef_max});
      report.lipschitz_bound = std::max(report.lipschitz_bound, row_sum);
    }
  }
  return report;
}

void require_valid(const GameModel& model, const TimeGrid& grid) {
  ValidationReport report = validate_model(model, grid);
  if (!report.ok()) throw ValidationError("invalid model: " + report.summary(), report.issues);
}

double fd_gradient_check(const GameModel& model, double t, std::span<const double> P, double step) {
  if (!(step > 0.0)) throw DomainError("finite-difference step must be positive");
  const std::vector<double> grad = eval_grad(model, t, P);
  std::vector<double> work(P.begin(), P.end());
  double worst = 0.0;
  for (int i = 0; i < model.group_count(); ++i) {
    const auto ui = static_cast<std::size_t>(i);
    const double lo = std::max(0.0, P[ui] - step);
    const double hi = std::min(1.0, P[ui] + step);
    work[ui] = hi;
    const double u_hi = eval_payoff(model, t, work)[ui];
    work[ui] = lo;
    const double u_lo = eval_payoff(model, t, work)[ui];
    work[ui] = P[ui];
    const double fd = (u_hi - u_lo) / (hi - lo);
    const double rel = std::abs(fd - grad[ui]) / std::max(1.0, std::abs(grad[ui]));
    worst = std::max(worst, rel);
  }
  return worst;
}

}  // namespace vaxeq
