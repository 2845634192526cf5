#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "duality.hpp"
#include "errors.hpp"
#include "test_util.hpp"

using namespace vaxeq;

namespace {

SolverParams default_params() {
  SolverParams p;
  p.tol = 1e-10;
  return p;
}

// Solved bang-bang instance on a 5-node grid, shared by most cases here.
struct BangBang {
  GameModel model = testutil::bangbang2();
  TimeGrid grid{1.0, 5};
  ProfileSolution sol = solve_profile(model, grid, default_params());
  RegimeClassification regimes = classify_regimes(sol.profile);
  MultiplierPair mult = extract_multipliers(model, sol.profile, regimes);
};

}  // namespace

TEST_CASE("regime classification thresholds") {
  StrategyProfile Q(TimeGrid(1.0, 2), 3);
  Q.at(0, 0) = 0.0;
  Q.at(0, 1) = 0.5;
  Q.at(0, 2) = 1.0;
  Q.at(1, 0) = 1e-12;
  Q.at(1, 1) = 1e-3;
  Q.at(1, 2) = 1.0 - 1e-12;
  const RegimeClassification r = classify_regimes(Q, 1e-8);
  CHECK(r.at(0, 0) == Regime::Minus);
  CHECK(r.at(0, 1) == Regime::Zero);
  CHECK(r.at(0, 2) == Regime::Plus);
  CHECK(r.at(1, 0) == Regime::Minus);
  CHECK(r.at(1, 1) == Regime::Zero);
  CHECK(r.at(1, 2) == Regime::Plus);
  CHECK(std::string(regime_label(Regime::Minus)) == "E_minus");
}

TEST_CASE("sign conditions on certified solutions") {
  BangBang bb;
  CHECK(check_sign_conditions(bb.model, bb.sol.profile, bb.regimes).pass);

  // single-group game pinned at the upper bound: g = r - pi = -0.1 <= 0
  const GameModel up = testutil::constant_pi_model({1.0}, {0.1}, {0.2});
  StrategyProfile Q(TimeGrid(1.0, 2), 1, 1.0);
  CHECK(check_sign_conditions(up, Q, classify_regimes(Q)).pass);

  // interior solution: |g| within sqrt(tol)
  const GameModel in = testutil::interior1();
  const ProfileSolution sol = solve_profile(in, TimeGrid(1.0, 5), default_params());
  CHECK(check_sign_conditions(in, sol.profile, classify_regimes(sol.profile)).pass);
}

TEST_CASE("sign conditions reject a flipped entry") {
  BangBang bb;
  StrategyProfile corrupted = bb.sol.profile;
  corrupted.at(2, 0) = 1.0 - corrupted.at(2, 0);
  const SignConditionReport r =
      check_sign_conditions(bb.model, corrupted, classify_regimes(corrupted));
  CHECK_FALSE(r.pass);
  CHECK(r.worst_node == 2);
  CHECK(r.worst_group == 0);
  CHECK(r.describe().find("E_plus") != std::string::npos);
}

TEST_CASE("multiplier extraction mirrors the slope onto the active side") {
  BangBang bb;
  for (int n = 0; n < bb.grid.n_nodes; ++n) {
    CHECK(bb.mult.alpha_at(n, 0) == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(bb.mult.beta_at(n, 0) == 0.0);
    CHECK(bb.mult.alpha_at(n, 1) == 0.0);
    CHECK(bb.mult.beta_at(n, 1) == doctest::Approx(0.1).epsilon(1e-14));
  }

  // interior: both fields vanish
  const GameModel in = testutil::interior1();
  const ProfileSolution sol = solve_profile(in, TimeGrid(1.0, 5), default_params());
  const MultiplierPair mult = extract_multipliers(in, sol.profile, classify_regimes(sol.profile));
  for (double a : mult.alpha) CHECK(a == 0.0);
  for (double b : mult.beta) CHECK(b == 0.0);

  // inconsistent candidate: g = 0.3 > 0 at the upper bound would need beta < 0
  const GameModel down = testutil::constant_pi_model({1.0}, {0.5}, {0.2});
  StrategyProfile bad(TimeGrid(1.0, 2), 1, 1.0);
  CHECK_THROWS_AS(extract_multipliers(down, bad, classify_regimes(bad)), ExtractionError);
}

TEST_CASE("kkt residual") {
  BangBang bb;
  CHECK(kkt_residual(bb.model, bb.sol.profile, bb.mult) <= 1e-12);

  // stationarity violated on an interior point with zero multipliers
  const GameModel m = testutil::constant_pi_model({1.0}, {0.5}, {0.2});
  StrategyProfile Q(TimeGrid(1.0, 2), 1, 0.5);
  MultiplierPair zero(Q.grid, 1);
  CHECK(kkt_residual(m, Q, zero) == doctest::Approx(0.3).epsilon(1e-14));

  // negativity term
  MultiplierPair negative = zero;
  negative.alpha[0] = -0.2;
  CHECK(kkt_residual(m, Q, negative) >= 0.2);
}

TEST_CASE("complementarity residual") {
  BangBang bb;
  CHECK(complementarity_check(bb.sol.profile, bb.mult) <= 1e-10);

  StrategyProfile Q(TimeGrid(1.0, 2), 1, 0.5);
  MultiplierPair mult(Q.grid, 1);
  mult.alpha.assign(mult.alpha.size(), 0.3);
  CHECK(complementarity_check(Q, mult) == doctest::Approx(0.15).epsilon(1e-14));

  StrategyProfile ones(TimeGrid(1.0, 2), 1, 1.0);
  MultiplierPair beta_only(ones.grid, 1);
  beta_only.beta.assign(beta_only.beta.size(), 0.2);
  CHECK(complementarity_check(ones, beta_only) == 0.0);
}

TEST_CASE("lagrangian value") {
  BangBang bb;

  CHECK(std::abs(lagrangian_value(bb.model, bb.sol.profile, bb.sol.profile, bb.mult)) <= 1e-10);

  // zero multipliers reduce the lagrangian to psi
  MultiplierPair zero(bb.grid, 2);
  StrategyProfile P(bb.grid, 2, 0.25);
  CHECK(lagrangian_value(bb.model, bb.sol.profile, P, zero) ==
        doctest::Approx(evi_value(bb.model, bb.sol.profile, P)).epsilon(1e-14));

  // flipped constant profile: psi = 0.4, <<alpha,P>> = 0.3, <<beta,P-1>> = -0.1.
  // At exact multipliers the lagrangian is constant in P, so the value is 0.
  StrategyProfile flipped(bb.grid, 2);
  for (int n = 0; n < bb.grid.n_nodes; ++n) {
    flipped.at(n, 0) = 1.0;
    flipped.at(n, 1) = 0.0;
  }
  CHECK(std::abs(lagrangian_value(bb.model, bb.sol.profile, flipped, bb.mult)) <= 1e-12);

  StrategyProfile other(TimeGrid(1.0, 7), 2);
  CHECK_THROWS_AS(lagrangian_value(bb.model, bb.sol.profile, other, bb.mult), DomainError);
}

TEST_CASE("saddle point sampling") {
  BangBang bb;

  SUBCASE("certified solution passes both sides") {
    const SaddleCheckResult r = saddle_point_check(bb.model, bb.sol.profile, bb.mult, 500, 7);
    CHECK(r.pass);
    CHECK(r.samples_passed == 1000);
    CHECK(r.worst_violation <= 1e-8);
  }

  SUBCASE("non-solution with zero multipliers fails the minimizer side") {
    const GameModel m = testutil::constant_pi_model({1.0}, {0.5}, {0.2});
    StrategyProfile Q(TimeGrid(1.0, 2), 1, 0.5);
    MultiplierPair zero(Q.grid, 1);
    const SaddleCheckResult r = saddle_point_check(m, Q, zero, 200, 7);
    CHECK_FALSE(r.pass);
    CHECK(r.counterexample.find("strategy sample") != std::string::npos);
  }

  SUBCASE("perturbing alpha where Q = 1 fails the maximizer side") {
    MultiplierPair perturbed = bb.mult;
    for (int n = 0; n < bb.grid.n_nodes; ++n)
      perturbed.alpha[static_cast<std::size_t>(n) * 2 + 1] += 0.1;  // group 2 sits at Q = 1
    const SaddleCheckResult r = saddle_point_check(bb.model, bb.sol.profile, perturbed, 200, 7);
    CHECK_FALSE(r.pass);
    CHECK(r.counterexample.find("multiplier sample") != std::string::npos);
  }
}

TEST_CASE("duality gap: closed form against enumeration") {
  BangBang bb;
  const DualityGap gap = duality_gap(bb.model, bb.sol.profile);
  CHECK(gap.primal == 0.0);
  CHECK(std::abs(gap.dual) <= 1e-12);
  CHECK(gap.gap <= 1e-8);

  // coarse enumeration for the unit test; the acceptance suite runs step 1e-7
  const double enumerated = dual_value_enumerated(bb.model, bb.sol.profile, 1e-4);
  CHECK(std::abs(enumerated - gap.dual) <= 1e-3);

  const GameModel flat = testutil::constant_pi_model({1.0}, {0.2}, {0.2});
  StrategyProfile Q(TimeGrid(1.0, 5), 1, 0.37);
  const DualityGap zero_gap = duality_gap(flat, Q);
  CHECK(zero_gap.primal == 0.0);
  CHECK(zero_gap.dual == 0.0);
  CHECK(zero_gap.gap == 0.0);
}

TEST_CASE("kkt converse: hand-built certificates force small natural residuals") {
  // exact bang-bang triple
  {
    const GameModel m = testutil::bangbang2();
    StrategyProfile Q(TimeGrid(1.0, 5), 2);
    MultiplierPair mult(Q.grid, 2);
    for (int n = 0; n < Q.grid.n_nodes; ++n) {
      Q.at(n, 0) = 0.0;
      Q.at(n, 1) = 1.0;
      mult.alpha[static_cast<std::size_t>(n) * 2] = 0.3;
      mult.beta[static_cast<std::size_t>(n) * 2 + 1] = 0.1;
    }
    REQUIRE(kkt_residual(m, Q, mult) <= 1e-10);
    for (int n = 0; n < Q.grid.n_nodes; ++n)
      CHECK(natural_residual(m, Q.grid.node(n), Q.slice(n), 1.0) <= 1e-6);
  }

  // exact interior stationary point of the linear-coverage game
  {
    const GameModel m = testutil::interior1();
    StrategyProfile Q(TimeGrid(1.0, 5), 1, 11.0 / 12.0);
    MultiplierPair mult(Q.grid, 1);
    REQUIRE(kkt_residual(m, Q, mult) <= 1e-10);
    for (int n = 0; n < Q.grid.n_nodes; ++n)
      CHECK(natural_residual(m, Q.grid.node(n), Q.slice(n), 1.0) <= 1e-6);
  }
}

TEST_CASE("verify_solution aggregates every check") {
  BangBang bb;
  SolverParams params = default_params();
  const DualityReport report = verify_solution(bb.model, bb.sol.profile, bb.mult, params);
  CHECK(report.pass);
  CHECK(report.kkt_residual <= 1e-6);
  CHECK(report.complementarity_residual <= 1e-8);
  CHECK(report.gap.gap <= 1e-8);
  CHECK(report.sign_conditions.pass);
  CHECK(report.saddle.pass);
  CHECK(report.evi_pass);
  CHECK(report.residual_pass);
  CHECK(std::abs(report.lagrangian_at_solution) <= 1e-10);
  CHECK(report.summary().find("passed") != std::string::npos);

  StrategyProfile corrupted = bb.sol.profile;
  corrupted.at(1, 1) = 0.0;  // flip an upper-bound entry across the box
  const DualityReport broken = verify_solution(bb.model, corrupted, bb.mult, params);
  CHECK_FALSE(broken.pass);
  CHECK_FALSE(broken.sign_conditions.pass);
}
