#include "qls/closed_form.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "qls/errors.hpp"

namespace qls {

double sphere_area(int N) {
  if (N < 2) throw DomainError("sphere_area: N must be >= 2, got " + std::to_string(N));
  return 2.0 * std::pow(std::numbers::pi, 0.5 * N) / std::tgamma(0.5 * N);
}

void TalentiBubble::validate() const {
  if (N < 3) throw DomainError("TalentiBubble: N must be >= 3");
  if (!(m > 0.0)) throw DomainError("TalentiBubble: m must be positive");
  if (!(mu > 0.0)) throw DomainError("TalentiBubble: mu must be positive");
}

double TalentiBubble::prefactor() const {
  return std::pow(N * (N - 2.0) / m, 0.25 * (N - 2.0));
}

double TalentiBubble::peak() const {
  return prefactor() * std::pow(mu, 0.5 * (N - 2.0));
}

double talenti_eval(const TalentiBubble& b, double r) {
  b.validate();
  if (r < 0.0) throw DomainError("talenti_eval: r must be >= 0");
  const double k = 0.5 * (b.N - 2.0);
  return b.prefactor() * std::pow(b.mu / (1.0 + b.mu * b.mu * r * r), k);
}

double talenti_derivative(const TalentiBubble& b, double r) {
  const double k = 0.5 * (b.N - 2.0);
  const double s = 1.0 + b.mu * b.mu * r * r;
  return -2.0 * k * b.mu * b.mu * r / s * talenti_eval(b, r);
}

double talenti_laplacian(const TalentiBubble& b, double r) {
  // v = A mu^k s^{-k}, s = 1 + mu^2 r^2:  Delta v = -N(N-2) mu^2 v / s^2.
  const double s = 1.0 + b.mu * b.mu * r * r;
  return -b.N * (b.N - 2.0) * b.mu * b.mu * talenti_eval(b, r) / (s * s);
}

double talenti_residual(const TalentiBubble& b, double r) {
  const double v = talenti_eval(b, r);
  const double q = (b.N + 2.0) / (b.N - 2.0);
  return talenti_laplacian(b, r) + b.m * std::pow(v, q);
}

double talenti_mu_from_peak(int N, double m, double peak) {
  if (!(peak > 0.0)) throw DomainError("talenti_mu_from_peak: peak must be positive");
  TalentiBubble unit{N, m, 1.0};
  unit.validate();
  return std::pow(peak / unit.prefactor(), 2.0 / (N - 2.0));
}

double FundamentalSolution::operator()(double r) const {
  if (N < 3) throw DomainError("FundamentalSolution: N must be >= 3");
  if (!(r > 0.0)) throw DomainError("FundamentalSolution: r must be > 0");
  return 1.0 / ((N - 2.0) * sphere_area(N) * std::pow(r, N - 2.0));
}

double FundamentalSolution::derivative(double r) const {
  return -(N - 2.0) * (*this)(r) / r;
}

double FundamentalSolution::second_derivative(double r) const {
  return (N - 2.0) * (N - 1.0) * (*this)(r) / (r * r);
}

double dilation_energy(double grad_norm_sq, int N, double t) {
  if (!(t > 0.0)) throw DomainError("dilation_energy: t must be > 0");
  if (!(grad_norm_sq > 0.0)) throw DomainError("dilation_energy: grad_norm_sq must be > 0");
  return (0.5 * std::pow(t, N - 2.0) - std::pow(t, N) * (N - 2.0) / (2.0 * N)) *
         grad_norm_sq;
}

double dilation_threshold(double grad_norm_sq, int N, double level) {
  if (!(level < 0.0)) throw DomainError("dilation_threshold: level must be negative");
  // Strictly decreasing on (1, inf); bracket then bisect.
  double lo = 1.0;
  double hi = 2.0;
  while (dilation_energy(grad_norm_sq, N, hi) >= level) {
    lo = hi;
    hi *= 2.0;
  }
  for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (dilation_energy(grad_norm_sq, N, mid) < level) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return hi;
}

}  // namespace qls
