#include <doctest.h>

#include <cmath>

#include "qls/errors.hpp"
#include "qls/radial_shooting.hpp"
#include "qls/semiclassical.hpp"
#include "qls/solver.hpp"

using namespace qls;

namespace {

const ShootResult& ground() {
  static const ShootResult g = find_ground_state(ShootConfig{});
  return g;
}

EnergyModel radial_model(double eps, std::size_t nodes = 1500) {
  const RescaleMap map{std::pow(eps, 1.0 / 11.0), 20.0, 4.0};
  Problem pb;
  pb.pots = Potentials::autonomous(1.0, 1.0);
  pb.pen.O.radius = 1000.0;
  pb.pen.beta = 5.0;
  pb.kappa = map.kappa();
  pb.eps = eps;
  return EnergyModel(Grid::radial_geometric(5, 1e-3, 2 * 5.0 / eps * 1.05, nodes), pb);
}

}  // namespace

TEST_CASE("zero is a critical point") {
  const EnergyModel model = radial_model(0.2, 400);
  const GridField zero(model.grid());
  const SolveOutcome o = solve(SolveConfig{}, model, ground().profile, &zero);
  CHECK(o.converged);
  CHECK(norm_linf(o.field) == 0.0);
  CHECK(o.report.Gamma_eps == 0.0);
}

TEST_CASE("Newton from the initializer recovers the ground state") {
  std::vector<double> dist, gap;
  for (double eps : {0.2, 0.1, 0.05}) {
    const EnergyModel model = radial_model(eps);
    const SolveOutcome o = solve(SolveConfig{}, model, ground().profile);
    REQUIRE(o.converged);
    CHECK(o.report.gradient_norm <= SolveConfig{}.gradient_tolerance);
    CHECK(o.report.Q_eps == 0.0);
    CHECK(o.positive);
    for (std::size_t i = 0; i < o.field.size(); ++i)
      if (!model.grid()->fixed(i)) CHECK(o.field[i] > 0.0);
    CHECK(norm_linf(o.field) <= 2.0 * ground().amplitude);
    CHECK(o.distance_to_X >= 0.0);
    dist.push_back(profile_distance_d12(o.field, ground().profile));
    gap.push_back(std::abs(o.report.Gamma_eps - ground().energy.energy));
  }
  CHECK(dist[1] < dist[0]);
  CHECK(dist[2] < dist[1]);
  CHECK(gap[1] < gap[0]);
  CHECK(gap[2] < gap[1]);
}

TEST_CASE("descent decreases the energy at every accepted step") {
  const EnergyModel model = radial_model(0.2, 600);
  SolveConfig cfg;
  cfg.method = SolveMethod::PreconditionedDescent;
  cfg.max_iterations = 60;
  cfg.gradient_tolerance = 1e-12;
  // Start below the saddle (t < 1) so the descent has somewhere to go.
  cfg.init_t = 0.8;
  const SolveOutcome o = solve(cfg, model, ground().profile);
  REQUIRE(o.trace.size() > 2);
  for (std::size_t k = 1; k < o.trace.size(); ++k)
    CHECK(o.trace[k].gamma <= o.trace[k - 1].gamma);
}

TEST_CASE("solves and sweeps are deterministic") {
  const EnergyModel a = radial_model(0.1, 800);
  const EnergyModel b = radial_model(0.1, 800);
  const SolveOutcome x = solve(SolveConfig{}, a, ground().profile);
  const SolveOutcome y = solve(SolveConfig{}, b, ground().profile);
  CHECK(x.field.values() == y.field.values());
  CHECK(x.iterations == y.iterations);

  std::vector<EnergyModel> models;
  for (double eps : {0.2, 0.1}) models.push_back(radial_model(eps, 800));
  std::vector<const EnergyModel*> ptrs{&models[0], &models[1]};
  const auto serial = continuation_sweep(SolveConfig{}, ptrs, ground().profile, false, 1);
  const auto parallel = continuation_sweep(SolveConfig{}, ptrs, ground().profile, false, 2);
  REQUIRE(serial.size() == 2);
  for (std::size_t k = 0; k < 2; ++k) {
    CHECK(serial[k].converged);
    CHECK(serial[k].field.values() == parallel[k].field.values());
  }
  const auto warm = continuation_sweep(SolveConfig{}, ptrs, ground().profile, true, 1);
  CHECK(warm[1].converged);
  CHECK(warm[1].report.Gamma_eps == doctest::Approx(serial[1].report.Gamma_eps).epsilon(1e-8));
}

TEST_CASE("a failing first point aborts the sweep") {
  EnergyModel m = radial_model(0.2, 400);
  std::vector<const EnergyModel*> ptrs{&m};
  SolveConfig cfg;
  cfg.max_iterations = 1;
  CHECK_THROWS_AS(continuation_sweep(cfg, ptrs, ground().profile, true), SweepAborted);
}

TEST_CASE("argmax tie-breaking picks the first node") {
  const auto g = Grid::radial_uniform(5, 1.0, 11);
  GridField v(g, {0, 1, 3, 3, 2, 0, 0, 0, 0, 0, 0});
  CHECK(argmax_node(v) == 2u);
}
