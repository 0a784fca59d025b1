#include "qls/semiclassical.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <boost/math/quadrature/exp_sinh.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "qls/closed_form.hpp"
#include "qls/errors.hpp"

namespace qls {

namespace {

Point scaled(const Point& p, double s) {
  Point q = p;
  q.r *= s;
  for (double& c : q.x) c *= s;
  return q;
}

}  // namespace

void RescaleMap::validate() const {
  if (!(hbar > 0.0) || !std::isfinite(hbar)) throw DomainError("hbar must be positive");
  if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
  if (!(p > 2.0)) throw DomainError("p must exceed 2");
}

double RescaleMap::kappa() const { return std::pow(hbar, (p - 2.0) * gamma / 2.0); }
double RescaleMap::eps() const { return std::pow(hbar, 1.0 + (p - 2.0) * gamma / 4.0); }
double RescaleMap::amplitude_factor() const { return std::pow(hbar, gamma / 2.0); }

void CriticalRescaleMap::validate() const {
  if (N < 3) throw DomainError("critical rescaling needs N >= 3");
  if (!(hbar > 0.0)) throw DomainError("hbar must be positive");
  if (!(gamma > 0.0)) throw DomainError("gamma must be positive");
  if (!(alpha > 0.0 && alpha < gamma))
    throw DomainError("alpha must lie strictly between 0 and gamma");
}

CriticalParams critical_params(const CriticalRescaleMap& map) {
  map.validate();
  const double p = map.p();
  CriticalParams c;
  c.lambda = std::pow(map.hbar, (p - 2.0) * map.alpha / 2.0);
  c.zeta = std::pow(map.hbar, map.gamma - map.alpha);
  c.eps = std::pow(map.hbar, 1.0 + (p - 2.0) * map.alpha / 4.0);
  return c;
}

GridField rescale_forward(const RescaleMap& map, const GridField& u, const GridPtr& target) {
  map.validate();
  const double e = map.eps(), a = map.amplitude_factor();
  GridField v = resample(u, target, [e](const Point& x) { return scaled(x, e); }, true);
  for (double& x : v.values()) x *= a;
  return v;
}

GridField rescale_backward(const RescaleMap& map, const GridField& v, const GridPtr& target) {
  map.validate();
  const double e = map.eps(), a = map.amplitude_factor();
  GridField u = resample(v, target, [e](const Point& y) { return scaled(y, 1.0 / e); }, true);
  for (double& x : u.values()) x /= a;
  return u;
}

double profile_distance_d12(const GridField& v, const RadialProfile& U, const Point& center) {
  const Grid& g = *v.grid();
  GridField diff(v.grid());
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double rho = g.is_radial() ? g.node(i).r : distance(g.node(i), center);
    diff[i] = v[i] - U.eval(rho);
  }
  double energy = dirichlet_energy(diff);
  if (g.is_radial()) {
    const int N = g.dimension();
    const double R = g.extent();
    auto density = [&](double r) {
      const double d = U.derivative(r);
      const double f = d * d * std::pow(r, N - 1);
      return std::isfinite(f) ? f : 0.0;
    };
    double outside = 0.0;
    const double r_end = std::max(R, U.r_end());
    if (R < U.r_end())
      outside += boost::math::quadrature::gauss_kronrod<double, 61>::integrate(
          [&](double t) {
            const double r = std::exp(t);
            return density(r) * r;
          },
          std::log(R), std::log(U.r_end()), 15, 1e-12);
    if (U.tail() == RadialProfile::Tail::Algebraic) {
      const double c = U.tail_constant();
      outside += (N - 2.0) * c * c * std::pow(r_end, 2.0 - N);
    } else {
      boost::math::quadrature::exp_sinh<double> quad;
      outside += quad.integrate([&](double s) { return density(r_end + s); });
    }
    energy += sphere_area(N) * outside;
  }
  return std::sqrt(std::max(energy, 0.0));
}

TailFit fit_tail(const GridField& v, const Point& center, double hi, double lo) {
  const Grid& g = *v.grid();
  const double vmax = norm_linf(v);
  TailFit fit;
  if (!(vmax > 0.0)) return fit;
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  double rho_start = INFINITY;
  std::size_t n = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.fixed(i)) continue;
    const double vi = v[i];
    if (!(vi <= hi * vmax && vi >= lo * vmax)) continue;
    const double rho = distance(g.node(i), center);
    const double y = std::log(vi);
    sx += rho;
    sy += y;
    sxx += rho * rho;
    sxy += rho * y;
    rho_start = std::min(rho_start, rho);
    ++n;
  }
  fit.nodes = n;
  if (n < 3) return fit;
  const double den = n * sxx - sx * sx;
  if (!(den > 0.0)) return fit;
  fit.slope = (n * sxy - sx * sy) / den;
  fit.intercept = (sy - fit.slope * sx) / n;
  fit.rho_start = rho_start;
  return fit;
}

ConcentrationReport concentration_report(const SolveOutcome& outcome, const EnergyModel& model,
                                         const RadialProfile& limit, double C_m,
                                         int search_cells) {
  if (!outcome.converged) throw UsageError("concentration report needs a converged solve");
  const GridField& v = outcome.field;
  const Grid& g = *v.grid();
  const Problem& pb = model.problem();
  ConcentrationReport rep;

  const std::size_t imax = argmax_node(v);
  rep.x_stretched = g.node(imax);
  rep.x_hbar = scaled(rep.x_stretched, pb.eps);
  rep.dist_to_M = pb.pots.M.distance(rep.x_hbar);

  // Profile error, minimized over node centers near the maximum.
  const double unorm = std::sqrt(profile_energy(limit, pb.transform, pb.p, 1.0).integrals.dirichlet);
  std::vector<Point> centers;
  if (g.is_radial()) {
    centers.push_back(Point{});
  } else {
    const auto ijk = [&](std::size_t idx) {
      std::array<long, 3> c{0, 0, 0};
      const long n = static_cast<long>(g.cells()) + 1;
      long rest = static_cast<long>(idx);
      for (int d = 0; d < g.dimension(); ++d) {
        c[d] = rest % n;
        rest /= n;
      }
      return c;
    };
    const auto c0 = ijk(imax);
    const long n = static_cast<long>(g.cells());
    const long s = search_cells;
    const long kz = g.dimension() == 3 ? s : 0;
    for (long a = -s; a <= s; ++a)
      for (long b = -s; b <= s; ++b)
        for (long c = -kz; c <= kz; ++c) {
          const long i = c0[0] + a, j = c0[1] + b, k = c0[2] + c;
          if (i < 0 || j < 0 || k < 0 || i > n || j > n || k > n) continue;
          centers.push_back(g.node(g.index(i, j, k)));
        }
  }
  double best = INFINITY;
  for (const Point& c : centers) best = std::min(best, profile_distance_d12(v, limit, c));
  rep.profile_error_d12 = best;
  rep.profile_error_rel = unorm > 0.0 ? best / unorm : INFINITY;

  // Exponential tail against the comparison function C exp(-xi sqrt(kappa) rho).
  const TailFit tail = fit_tail(v, rep.x_stretched);
  rep.tail_window_nodes = tail.nodes;
  const double sk = std::sqrt(pb.kappa);
  const double V0 = pb.pots.V0;
  if (tail.nodes >= 3 && sk > 0.0) {
    rep.tail_xi_fit = -tail.slope / sk;
    rep.tail_xi = std::min(rep.tail_xi_fit, (1.0 - 1e-3) * 0.5 * std::sqrt(V0));
    rep.tail_rate_admissible = rep.tail_xi > 0.0 && 4.0 * rep.tail_xi * rep.tail_xi < V0 &&
                               rep.tail_xi_fit >= rep.tail_xi;
    // C from the inner edge of the window (one cell wide on tensor grids).
    const double band = g.is_radial() ? 0.0 : g.spacing();
    const double vmax = norm_linf(v);
    double C = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (g.fixed(i)) continue;
      const double rho = distance(g.node(i), rep.x_stretched);
      if (rho >= tail.rho_start - band - 1e-12 && rho <= tail.rho_start + 1e-12 * (1 + rho))
        C = std::max(C, v[i] * std::exp(rep.tail_xi * sk * rho));
    }
    bool ok = C > 0.0;
    for (std::size_t i = 0; i < g.size() && ok; ++i) {
      if (g.fixed(i)) continue;
      const double rho = distance(g.node(i), rep.x_stretched);
      if (rho < tail.rho_start || v[i] < 1e-8 * vmax) continue;
      if (v[i] > C * std::exp(-rep.tail_xi * sk * rho) * (1.0 + 1e-12)) ok = false;
    }
    rep.tail_dominated = ok;
  }

  rep.energy_gap = std::abs(outcome.report.Gamma_eps - C_m);
  rep.penalty_integral = outcome.report.penalty_integral;
  rep.Q_active = outcome.report.Q_eps > 0.0;
  return rep;
}

namespace {

CriticalFit fit_samples(const std::vector<double>& r, const std::vector<double>& v, int N,
                        double m) {
  if (r.empty() || r.front() != 0.0) throw UsageError("critical fit needs a radial field from r = 0");
  CriticalFit fit;
  const double peak = v.front();
  if (!(peak > 0.0)) throw DomainError("critical fit needs a positive peak");
  fit.mu = talenti_mu_from_peak(N, m, peak);
  for (std::size_t i = 1; i < r.size(); ++i) {
    if (v[i] <= 0.5 * peak) {
      const double t = (v[i - 1] - 0.5 * peak) / (v[i - 1] - v[i]);
      const double rh = r[i - 1] + t * (r[i] - r[i - 1]);
      fit.mu_half_width = std::sqrt(std::pow(2.0, 2.0 / (N - 2.0)) - 1.0) / rh;
      break;
    }
  }
  const TalentiBubble b{N, m, fit.mu};
  double err = 0.0;
  for (std::size_t i = 0; i < r.size() && r[i] <= 10.0 / fit.mu; ++i)
    err = std::max(err, std::abs(v[i] - talenti_eval(b, r[i])));
  fit.linf_rel_error = err / b.peak();
  return fit;
}

}  // namespace

CriticalFit critical_profile_fit(const GridField& w, double m) {
  const Grid& g = *w.grid();
  if (!g.is_radial()) throw UsageError("critical fit needs a radial grid");
  std::vector<double> r(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) r[i] = g.node(i).r;
  return fit_samples(r, w.values(), g.dimension(), m);
}

CriticalFit critical_profile_fit(const RadialProfile& w, double m) {
  return fit_samples(w.r(), w.v(), w.dimension(), m);
}

double critical_mu_prediction(int N, double m, double lambda, double V0, double zeta) {
  if (N < 5) throw DomainError("the bubble is not square integrable for N < 5");
  if (!(lambda > 0.0 && zeta > 0.0 && V0 > 0.0 && m > 0.0))
    throw DomainError("mu prediction needs positive lambda, zeta, V0 and m");
  const TalentiBubble b{N, m, 1.0};
  const double q = 2.0 * N / (N - 2.0) + 2.0;
  boost::math::quadrature::exp_sinh<double> quad;
  const double I2 = quad.integrate([&](double r) {
    const double t = talenti_eval(b, r);
    const double f = t * t * std::pow(r, N - 1);
    return std::isfinite(f) ? f : 0.0;
  });
  const double I4 = quad.integrate([&](double r) {
    const double f = std::pow(talenti_eval(b, r), q) * std::pow(r, N - 1);
    return std::isfinite(f) ? f : 0.0;
  });
  return std::pow(3.0 * lambda * V0 * I2 / ((N - 2.0) * m * zeta * I4), 1.0 / N);
}

RadialProfile talenti_profile(int N, double m, double mu, double r_max, std::size_t nodes) {
  const TalentiBubble b{N, m, mu};
  b.validate();
  if (nodes < 3) throw UsageError("talenti profile needs at least 3 nodes");
  const double r1 = 1e-4 / mu;
  std::vector<double> r{0.0}, v{b.peak()}, dv{0.0};
  const double q = std::log(r_max / r1) / static_cast<double>(nodes - 2);
  for (std::size_t i = 0; i + 1 < nodes; ++i) {
    const double ri = r1 * std::exp(q * static_cast<double>(i));
    r.push_back(ri);
    v.push_back(talenti_eval(b, ri));
    dv.push_back(talenti_derivative(b, ri));
  }
  return RadialProfile(N, std::move(r), std::move(v), std::move(dv));
}

}  // namespace qls
