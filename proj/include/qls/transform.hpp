#pragma once

namespace qls {

/// Dual change of variables u = G^{-1}(v) with G' = g, g(s) = sqrt(1 + 2 zeta s^2).
///
/// zeta = 1 is the standard quasilinear transform; zeta = 0 degenerates to the
/// identity (g = 1, G = id) and is handled by an exact branch. All members are
/// pure and safe for concurrent use.
class Transform {
 public:
  explicit Transform(double zeta = 1.0);

  double zeta() const { return zeta_; }
  bool is_identity() const { return zeta_ == 0.0; }

  double g(double t) const;
  double G(double t) const;
  /// Inverse of G by safeguarded Newton on [0, |v|].
  double G_inverse(double v) const;

  /// lim G^{-1}(v)/sqrt(v) as v -> infinity, i.e. (2/zeta)^{1/4}.
  double sqrt_growth_constant() const;

  /// G^{-1}(v) / g(G^{-1}(v)); the linear-term nonlinearity of the dual equation.
  double mass_term(double v) const;
  /// d/dv of mass_term, equal to 1/g(u)^4.
  double mass_term_derivative(double v) const;
  /// |u|^{p-2} u / g(u) with u = G^{-1}(v).
  double source_term(double v, double p) const;
  double source_term_derivative(double v, double p) const;
  /// |G^{-1}(v)|^p.
  double source_potential(double v, double p) const;

 private:
  double zeta_;
  double two_zeta_;
  double sqrt_two_zeta_;
};

/// asinh through log1p; keeps full relative accuracy for small arguments.
double stable_asinh(double x);

}  // namespace qls
