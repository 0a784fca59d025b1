#include "qls/transform.hpp"

#include <cmath>
#include <limits>

#include "qls/errors.hpp"

namespace qls {

namespace {

void require_finite(double x, const char* what) {
  if (!std::isfinite(x)) {
    throw DomainError(std::string(what) + ": non-finite argument");
  }
}

}  // namespace

double stable_asinh(double x) {
  const double a = std::fabs(x);
  double r;
  if (a > 1e150) {
    r = std::log(a) + std::log(2.0);
  } else {
    r = std::log1p(a + a * a / (1.0 + std::sqrt(1.0 + a * a)));
  }
  return std::copysign(r, x);
}

Transform::Transform(double zeta)
    : zeta_(zeta), two_zeta_(2.0 * zeta), sqrt_two_zeta_(std::sqrt(2.0 * zeta)) {
  if (!(zeta >= 0.0) || !std::isfinite(zeta)) {
    throw DomainError("Transform: zeta must be finite and >= 0");
  }
}

double Transform::g(double t) const {
  require_finite(t, "g");
  return std::sqrt(1.0 + two_zeta_ * t * t);
}

double Transform::G(double t) const {
  require_finite(t, "G");
  if (is_identity()) return t;
  const double a = std::fabs(t);
  const double value =
      0.5 * a * std::sqrt(1.0 + two_zeta_ * a * a) +
      stable_asinh(sqrt_two_zeta_ * a) / (2.0 * sqrt_two_zeta_);
  return std::copysign(value, t);
}

double Transform::sqrt_growth_constant() const {
  if (is_identity()) return std::numeric_limits<double>::infinity();
  return std::pow(2.0 / zeta_, 0.25);
}

double Transform::G_inverse(double v) const {
  require_finite(v, "G_inverse");
  if (is_identity() || v == 0.0) return v;
  const double target = std::fabs(v);
  // Both |v| and (2/zeta)^{1/4} sqrt|v| bound the root from above; G is convex
  // on [0, inf) so Newton from an upper bound decreases monotonically.
  double lo = 0.0;
  double hi = target;
  double t = std::min(target, sqrt_growth_constant() * std::sqrt(target));
  for (int it = 0; it < 100; ++it) {
    const double f = G(t) - target;
    if (f == 0.0) break;
    if (f > 0.0) {
      hi = std::min(hi, t);
    } else {
      lo = std::max(lo, t);
    }
    double next = t - f / g(t);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::fabs(next - t) <= 2.0 * std::numeric_limits<double>::epsilon() * t) {
      t = next;
      break;
    }
    t = next;
  }
  return std::copysign(t, v);
}

double Transform::mass_term(double v) const {
  const double u = G_inverse(v);
  return u / g(u);
}

double Transform::mass_term_derivative(double v) const {
  const double gu = g(G_inverse(v));
  const double g2 = gu * gu;
  return 1.0 / (g2 * g2);
}

double Transform::source_term(double v, double p) const {
  const double u = G_inverse(v);
  if (u == 0.0) return 0.0;
  return std::pow(std::fabs(u), p - 2.0) * u / g(u);
}

double Transform::source_term_derivative(double v, double p) const {
  const double u = G_inverse(v);
  if (u == 0.0) return p == 2.0 ? 1.0 : 0.0;
  const double gu = g(u);
  const double g2 = gu * gu;
  return std::pow(std::fabs(u), p - 2.0) *
         ((p - 1.0) + zeta_ * 2.0 * (p - 2.0) * u * u) / (g2 * g2);
}

double Transform::source_potential(double v, double p) const {
  return std::pow(std::fabs(G_inverse(v)), p);
}

}  // namespace qls
