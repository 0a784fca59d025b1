#pragma once

#include <cmath>
#include <string>

#include "qls/discretization.hpp"
#include "qls/potential_dsl.hpp"

namespace qls {

/// The set where K attains its maximum over O: a point or a sphere around a center.
struct ConcentrationSet {
  enum class Shape { Point, Sphere };
  Shape shape = Shape::Point;
  std::array<double, 3> center{0.0, 0.0, 0.0};
  double radius = 0.0;

  double distance(const Point& x) const;
  /// A representative point of the set (the center, or the sphere point on the x1 axis).
  Point representative() const;
};

/// External potential V, source potential K and the constants that describe them.
struct Potentials {
  Expr V;
  Expr K;
  double m = 1.0;       ///< sup of K over O
  double K0 = INFINITY; ///< strict upper bound for sup K
  double V0 = 1.0;      ///< positive lower bound for V
  ConcentrationSet M;

  /// V = V0 and K = m everywhere.
  static Potentials autonomous(double V0, double m);
  bool radial_only() const { return V.radial_only() && K.radial_only(); }
};

/// Penalization data: chi = 0 where eps x lies in O and eps^{-tau} elsewhere.
struct PenalizationConfig {
  double tau = 1.0;
  Region O{{0.0, 0.0, 0.0}, 1000.0};
  double beta = 1.0;
  double t0 = 0.0;  ///< 0 means "derive from the ground state"

  /// Throws ConfigError when beta or t0 violate their constraints.
  void validate(const Potentials& pots) const;
};

}  // namespace qls
