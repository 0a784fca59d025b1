#include <doctest.h>

#include <cmath>

#include "qls/closed_form.hpp"
#include "qls/errors.hpp"
#include "qls/radial_shooting.hpp"
#include "qls/semiclassical.hpp"

using namespace qls;

TEST_CASE("subcritical rescaling parameters") {
  const RescaleMap m{0.1, 2.0, 4.0};
  CHECK(m.kappa() == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(m.eps() == doctest::Approx(0.01).epsilon(1e-14));
  CHECK(m.amplitude_factor() == doctest::Approx(0.1).epsilon(1e-14));
  const RescaleMap id{1.0, 7.0, 3.0};
  CHECK(id.kappa() == 1.0);
  CHECK(id.eps() == 1.0);
  CHECK(id.amplitude_factor() == 1.0);
  CHECK_THROWS_AS((RescaleMap{0.0, 2.0, 4.0}.validate()), DomainError);
  CHECK_THROWS_AS((RescaleMap{0.5, -1.0, 4.0}.validate()), DomainError);
}

TEST_CASE("the two parameterizations agree") {
  for (double hbar : {0.9, 0.5, 0.1, 1e-3})
    for (double gamma : {0.5, 2.0, 20.0})
      for (double p : {2.5, 4.0, 5.5}) {
        const RescaleMap m{hbar, gamma, p};
        const double k = 2 * (p - 2) * gamma / (4 + (p - 2) * gamma);
        CHECK(std::abs(m.kappa() - std::pow(m.eps(), k)) <= 1e-12 * m.kappa());
        CHECK(std::abs(std::sqrt(m.kappa()) / m.eps() * hbar - 1.0) <= 1e-12);
      }
}

TEST_CASE("critical rescaling parameters") {
  const CriticalParams c = critical_params(CriticalRescaleMap{0.1, 2.0, 1.0, 5});
  CHECK(c.lambda == doctest::Approx(0.21544).epsilon(1e-4));
  CHECK(c.zeta == doctest::Approx(0.1).epsilon(1e-14));
  CHECK(c.eps == doctest::Approx(0.046416).epsilon(1e-4));
  const CriticalParams one = critical_params(CriticalRescaleMap{1.0, 2.0, 1.0, 5});
  CHECK(one.lambda == 1.0);
  CHECK(one.zeta == 1.0);
  CHECK(one.eps == 1.0);
  CHECK_THROWS_AS(critical_params(CriticalRescaleMap{0.1, 2.0, 2.0, 5}), DomainError);
  CHECK_THROWS_AS(critical_params(CriticalRescaleMap{0.1, 2.0, 0.0, 5}), DomainError);
  CHECK_THROWS_AS(critical_params(CriticalRescaleMap{0.1, 2.0, 1.0, 2}), DomainError);
}

TEST_CASE("forward and backward rescaling are inverse") {
  const RescaleMap map{0.5, 2.0, 4.0};  // eps = 0.25
  const TalentiBubble b{5, 1.0, 1.0};
  const auto original = Grid::radial_geometric(5, 1e-3, 20.0, 6000);
  GridField u(original);
  for (std::size_t i = 0; i + 1 < original->size(); ++i) u[i] = talenti_eval(b, original->node(i).r);
  const auto stretched = Grid::radial_geometric(5, 4e-3, 80.0, 6000);
  const GridField v = rescale_forward(map, u, stretched);
  for (std::size_t i = 0; i + 1 < stretched->size(); i += 37) {
    const double r = stretched->node(i).r;
    CHECK(v[i] == doctest::Approx(map.amplitude_factor() * talenti_eval(b, map.eps() * r)).epsilon(1e-6));
  }
  const GridField back = rescale_backward(map, v, original);
  double worst = 0.0;
  for (std::size_t i = 0; i + 1 < original->size(); ++i) worst = std::max(worst, std::abs(back[i] - u[i]));
  CHECK(worst <= 1e-6 * b.peak());
}

TEST_CASE("bubble fit recovers the family") {
  const RadialProfile T = talenti_profile(5, 1.0, 0.7);
  const CriticalFit fit = critical_profile_fit(T, 1.0);
  CHECK(fit.mu == doctest::Approx(0.7).epsilon(1e-12));
  CHECK(fit.mu_half_width == doctest::Approx(0.7).epsilon(1e-3));
  CHECK(fit.linf_rel_error <= 1e-6);

  const auto g = Grid::radial_geometric(5, 1e-3, 1e4, 8000);
  const CriticalFit fg = critical_profile_fit(T.sample(g), 1.0);
  CHECK(fg.linf_rel_error <= 1e-6);
}

TEST_CASE("predicted bubble scale") {
  // With lambda = zeta the prediction depends only on V0 and m.
  const double a = critical_mu_prediction(5, 1.0, 0.01, 1.0, 0.01);
  const double b = critical_mu_prediction(5, 1.0, 0.2, 1.0, 0.2);
  CHECK(a == doctest::Approx(b).epsilon(1e-10));
  CHECK(a == doctest::Approx(0.62832).epsilon(1e-4));
  CHECK(critical_mu_prediction(5, 1.0, 0.02, 1.0, 0.01) ==
        doctest::Approx(a * std::pow(2.0, 0.2)).epsilon(1e-10));
  CHECK_THROWS_AS(critical_mu_prediction(4, 1.0, 0.1, 1.0, 0.1), DomainError);
}

TEST_CASE("tail fit on an exact exponential") {
  const auto g = Grid::radial_uniform(5, 60.0, 3001);
  GridField v(g);
  for (std::size_t i = 0; i + 1 < g->size(); ++i) v[i] = 3.0 * std::exp(-0.8 * g->node(i).r);
  const TailFit t = fit_tail(v, {});
  CHECK(t.slope == doctest::Approx(-0.8).epsilon(1e-10));
  CHECK(t.intercept == doctest::Approx(std::log(3.0)).epsilon(1e-10));
  CHECK(t.nodes > 100);
}

TEST_CASE("distance to the limit profile") {
  const ShootResult gs = find_ground_state(ShootConfig{});
  const auto g = Grid::radial_geometric(5, 1e-3, 1e4, 12000);
  const GridField U = gs.profile.sample(g);
  const double D = gs.energy.integrals.dirichlet;
  CHECK(profile_distance_d12(U, gs.profile) <= 1e-3 * std::sqrt(D));
  GridField scaled = U;
  for (double& x : scaled.values()) x *= 1.01;
  CHECK(profile_distance_d12(scaled, gs.profile) == doctest::Approx(0.01 * std::sqrt(D)).epsilon(1e-2));
}

TEST_CASE("reports are refused for unconverged outcomes") {
  Problem pb;
  pb.pots = Potentials::autonomous(1.0, 1.0);
  const EnergyModel model(Grid::radial_geometric(5, 1e-3, 10.0, 50), pb);
  SolveOutcome o;
  o.field = GridField(model.grid());
  o.converged = false;
  CHECK_THROWS_AS(concentration_report(o, model, talenti_profile(5, 1.0, 1.0), 1.0), UsageError);
}
