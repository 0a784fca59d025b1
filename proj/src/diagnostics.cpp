#include "qls/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "qls/semiclassical.hpp"

namespace qls {

std::string to_string(CheckStatus s) {
  switch (s) {
    case CheckStatus::Pass: return "pass";
    case CheckStatus::Fail: return "fail";
    case CheckStatus::Skip: return "skip";
  }
  return "?";
}

bool SuiteResult::passed() const {
  return std::none_of(checks.begin(), checks.end(),
                      [](const CheckResult& c) { return c.status == CheckStatus::Fail; });
}

const CheckResult* SuiteResult::find(const std::string& name) const {
  for (const auto& c : checks)
    if (c.name == name) return &c;
  return nullptr;
}

double massive_green_factor(int N, double a, double r) {
  if (a == 0.0 || r == 0.0) return 1.0;
  const double nu = 0.5 * (N - 2.0);
  const double z = a * r;
  if (z > 700.0) return 0.0;
  return std::pow(z, nu) * std::cyl_bessel_k(nu, z) / (std::pow(2.0, nu - 1.0) * std::tgamma(nu));
}

PlateauMeasure tail_plateau(const GridField& v, double decay_rate) {
  const Grid& g = *v.grid();
  PlateauMeasure out;
  if (!g.is_radial() || g.dimension() < 3) return out;
  const int N = g.dimension();
  const double vmax = norm_linf(v);
  // End of the resolved far field: half the domain, and above 1e-10 of the peak.
  double r_hi = 0.5 * g.extent();
  for (std::size_t i = g.size(); i-- > 0;) {
    if (g.node(i).r <= r_hi && v[i] >= 1e-10 * vmax) {
      r_hi = g.node(i).r;
      break;
    }
  }
  const double r_lo = r_hi / 10.0;
  double lo = INFINITY, hi = -INFINITY, sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double r = g.node(i).r;
    if (r < r_lo || r > r_hi) continue;
    const double f = massive_green_factor(N, decay_rate, r);
    if (!(f > 0.0)) continue;
    const double q = std::pow(r, N - 2) * v[i] / f;
    lo = std::min(lo, q);
    hi = std::max(hi, q);
    sum += q;
    ++n;
  }
  out.r_lo = r_lo;
  out.r_hi = r_hi;
  out.nodes = n;
  out.variation = n > 0 && sum > 0.0 ? (hi - lo) / (sum / n) : INFINITY;
  return out;
}

TrendCheck majority_trend(const std::vector<double>& values, bool decreasing) {
  TrendCheck t;
  for (std::size_t i = 1; i < values.size(); ++i) {
    ++t.pairs;
    const double d = values[i] - values[i - 1];
    if (decreasing ? d < 0.0 : d > 0.0) ++t.agreeing;
  }
  t.passed = t.pairs > 0 && 2 * t.agreeing >= t.pairs;
  return t;
}

SuiteResult run_suite(const SolveOutcome& outcome, const SuiteContext& ctx) {
  SuiteResult res;
  res.checks.reserve(5);
  auto add = [&](std::string name, std::string property) -> CheckResult& {
    res.checks.push_back({std::move(name), std::move(property), CheckStatus::Skip, 0.0, 0.0, ""});
    return res.checks.back();
  };
  CheckResult& a = add("pohozaev", "Pohozaev identity of the autonomous equation");
  CheckResult& b = ctx.critical ? add("bubble_fit", "relative sup distance to the fitted bubble")
                                : add("tail_plateau", "r^{N-2} v over the massive Green factor is flat");
  CheckResult& c = add("energy_gap", "|Gamma(v) - C_m|, trend-checked across sweeps");
  CheckResult& d = add("sup_lower_bound", "sup norm bounded below by a fraction of the ground state");
  CheckResult& e = add("penalty_inactive", "penalization term vanishes exactly");

  if (!outcome.converged || ctx.model == nullptr) {
    for (auto& ch : res.checks) ch.reason = outcome.converged ? "no model in context" : "solve did not converge";
    return res;
  }
  const EnergyModel& model = *ctx.model;
  const GridField& v = outcome.field;

  a.tolerance = ctx.pohozaev_tolerance;
  if (ctx.autonomous) {
    a.value = std::abs(pohozaev_residual(v, model));
    a.status = a.value <= a.tolerance ? CheckStatus::Pass : CheckStatus::Fail;
  } else {
    a.reason = "identity only holds for constant V and K";
  }

  if (ctx.critical) {
    b.tolerance = ctx.talenti_tolerance;
    if (!v.grid()->is_radial()) {
      b.reason = "bubble fit needs a radial grid";
    } else {
      const double m = model.K().front();
      const CriticalFit fit = critical_profile_fit(v, m);
      b.value = fit.linf_rel_error;
      b.status = b.value <= b.tolerance ? CheckStatus::Pass : CheckStatus::Fail;
    }
  } else {
    b.tolerance = ctx.plateau_tolerance;
    const Grid& g = *v.grid();
    if (!g.is_radial() || g.dimension() < 3) {
      b.reason = "no algebraic decay law on this grid";
    } else if (!ctx.autonomous) {
      b.reason = "far-field rate needs constant V";
    } else {
      const Problem& pb = model.problem();
      const double rate = std::sqrt(pb.kappa * model.V().front());
      const PlateauMeasure pm = tail_plateau(v, rate);
      b.value = pm.variation;
      if (pm.nodes < 5) {
        b.status = CheckStatus::Fail;
        b.reason = "far field not resolved";
      } else {
        b.status = b.value <= b.tolerance ? CheckStatus::Pass : CheckStatus::Fail;
      }
    }
  }

  c.value = std::abs(outcome.report.Gamma_eps - ctx.C_m);
  c.status = std::isfinite(c.value) ? CheckStatus::Pass : CheckStatus::Fail;
  c.reason = "recorded; the trend is checked across a sweep";

  d.tolerance = ctx.sup_fraction * ctx.ground_sup;
  d.value = norm_linf(v);
  d.status = d.value >= d.tolerance ? CheckStatus::Pass : CheckStatus::Fail;

  e.value = outcome.report.Q_eps;
  e.status = e.value == 0.0 ? CheckStatus::Pass : CheckStatus::Fail;
  return res;
}

}  // namespace qls
