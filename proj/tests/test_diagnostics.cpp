#include <doctest.h>

#include <cmath>

#include "qls/diagnostics.hpp"
#include "qls/radial_shooting.hpp"
#include "qls/semiclassical.hpp"

using namespace qls;

namespace {

const ShootResult& ground() {
  static const ShootResult g = find_ground_state(ShootConfig{});
  return g;
}

struct Run {
  EnergyModel model;
  SolveOutcome outcome;
};

Run autonomous_run(double eps, std::size_t nodes) {
  const RescaleMap map{std::pow(eps, 1.0 / 11.0), 20.0, 4.0};
  Problem pb;
  pb.pots = Potentials::autonomous(1.0, 1.0);
  pb.pen.O.radius = 1000.0;
  pb.pen.beta = 5.0;
  pb.kappa = map.kappa();
  pb.eps = eps;
  EnergyModel model(Grid::radial_geometric(5, 1e-3, 2 * 5.0 / eps * 1.05, nodes), pb);
  SolveOutcome o = solve(SolveConfig{}, model, ground().profile);
  return {std::move(model), std::move(o)};
}

SuiteContext context(const EnergyModel& m) {
  SuiteContext c;
  c.model = &m;
  c.ground_sup = ground().amplitude;
  c.C_m = ground().energy.energy;
  c.autonomous = true;
  return c;
}

}  // namespace

TEST_CASE("healthy autonomous solve passes every check") {
  const Run run = autonomous_run(std::pow(0.57, 11.0), 6000);
  REQUIRE(run.outcome.converged);
  const SuiteResult s = run_suite(run.outcome, context(run.model));
  CHECK(s.passed());
  for (const char* name : {"pohozaev", "tail_plateau", "energy_gap", "sup_lower_bound", "penalty_inactive"}) {
    const CheckResult* c = s.find(name);
    REQUIRE(c != nullptr);
    CHECK(c->status == CheckStatus::Pass);
    CHECK_FALSE(c->property.empty());
  }
  const SuiteResult again = run_suite(run.outcome, context(run.model));
  REQUIRE(again.checks.size() == s.checks.size());
  for (std::size_t k = 0; k < s.checks.size(); ++k) {
    CHECK(again.checks[k].value == s.checks[k].value);
    CHECK(again.checks[k].status == s.checks[k].status);
  }
}

TEST_CASE("a perturbed field fails the Pohozaev check") {
  const Run run = autonomous_run(0.1, 600);
  REQUIRE(run.outcome.converged);
  // The identity is exact for discrete critical points at any resolution, so
  // only a non-critical field should trip it.
  SolveOutcome o = run.outcome;
  for (double& x : o.field.values()) x *= 1.1;
  o.report = run.model.report(o.field);
  const SuiteResult s = run_suite(o, context(run.model));
  CHECK(s.find("pohozaev")->status == CheckStatus::Fail);
  CHECK(s.find("penalty_inactive")->status == CheckStatus::Pass);
  CHECK(s.find("sup_lower_bound")->status == CheckStatus::Pass);
  CHECK_FALSE(s.passed());
}

TEST_CASE("unconverged outcomes are skipped with a reason") {
  const Run run = autonomous_run(0.1, 300);
  SolveOutcome o = run.outcome;
  o.converged = false;
  const SuiteResult s = run_suite(o, context(run.model));
  for (const CheckResult& c : s.checks) {
    CHECK(c.status == CheckStatus::Skip);
    CHECK_FALSE(c.reason.empty());
  }
}

TEST_CASE("critical solves use the bubble fit") {
  const Run run = autonomous_run(0.1, 300);
  SuiteContext c = context(run.model);
  c.critical = true;
  const SuiteResult s = run_suite(run.outcome, c);
  CHECK(s.find("bubble_fit") != nullptr);
  CHECK(s.find("tail_plateau") == nullptr);
}

TEST_CASE("massive Green factor") {
  CHECK(massive_green_factor(5, 0.0, 3.0) == 1.0);
  // N = 3: nu = 1/2 and the factor reduces to exp(-a r).
  for (double ar : {0.1, 1.0, 7.0}) CHECK(massive_green_factor(3, ar, 1.0) == doctest::Approx(std::exp(-ar)));
  // N = 5: nu = 3/2, K_{3/2}(z) = sqrt(pi/(2z)) e^{-z}(1 + 1/z).
  for (double z : {0.2, 2.0}) CHECK(massive_green_factor(5, z, 1.0) == doctest::Approx((1 + z) * std::exp(-z)));
}

TEST_CASE("tail plateau of the exact far field") {
  const auto g = Grid::radial_geometric(5, 1e-3, 1e3, 4000);
  GridField v(g);
  for (std::size_t i = 0; i + 1 < g->size(); ++i) v[i] = 2.0 / std::pow(1.0 + g->node(i).r * g->node(i).r, 1.5);
  const PlateauMeasure pm = tail_plateau(v, 0.0);
  CHECK(pm.variation < 0.05);
  CHECK(pm.r_hi == doctest::Approx(10 * pm.r_lo));
  CHECK(pm.nodes > 10);
}

TEST_CASE("majority trends") {
  CHECK(majority_trend({4, 3, 2, 1}).passed);
  CHECK(majority_trend({4, 3, 3.5, 1}).passed);
  CHECK_FALSE(majority_trend({1, 2, 3, 2}).passed);
  CHECK(majority_trend({1, 2, 3}, false).passed);
  const TrendCheck t = majority_trend({5, 4, 6, 3, 7});
  CHECK(t.pairs == 4u);
  CHECK(t.agreeing == 2u);
  CHECK(to_string(CheckStatus::Skip) == "skip");
}
