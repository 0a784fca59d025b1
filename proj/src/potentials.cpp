#include "qls/potentials.hpp"

#include <cmath>

#include "qls/csv.hpp"
#include "qls/errors.hpp"

namespace qls {

double ConcentrationSet::distance(const Point& x) const {
  double s = 0.0;
  for (int d = 0; d < 3; ++d) s += (x.x[d] - center[d]) * (x.x[d] - center[d]);
  const double rho = std::sqrt(s);
  return shape == Shape::Point ? rho : std::abs(rho - radius);
}

Point ConcentrationSet::representative() const {
  Point p;
  p.x = center;
  if (shape == Shape::Sphere) p.x[0] += radius;
  p.r = std::sqrt(p.x[0] * p.x[0] + p.x[1] * p.x[1] + p.x[2] * p.x[2]);
  return p;
}

Potentials Potentials::autonomous(double V0, double m) {
  Potentials P;
  P.V = parse(format_double(V0));
  P.K = parse(format_double(m));
  P.m = m;
  P.V0 = V0;
  return P;
}

void PenalizationConfig::validate(const Potentials& pots) const {
  if (!(tau > 0.0)) throw ConfigError("penalization tau must be positive");
  if (!(O.radius > 0.0)) throw ConfigError("region O must have a positive radius");
  // Distance from the concentration set to the complement of O.
  double far = pots.M.shape == ConcentrationSet::Shape::Point ? 0.0 : pots.M.radius;
  double off = 0.0;
  for (int d = 0; d < 3; ++d) off += (pots.M.center[d] - O.center[d]) * (pots.M.center[d] - O.center[d]);
  const double gap = O.radius - (std::sqrt(off) + far);
  if (!(gap > 0.0)) throw ConfigError("concentration set is not inside O");
  if (!(beta > 0.0) || !(beta < gap / 100.0))
    throw ConfigError("beta must satisfy 0 < beta < dist(M, complement of O)/100 = " +
                      std::to_string(gap / 100.0));
  if (t0 != 0.0 && !(t0 > 1.0)) throw ConfigError("t0 must exceed 1");
}

}  // namespace qls
