#pragma once

#include <string>
#include <vector>

#include "qls/discretization.hpp"
#include "qls/transform.hpp"

namespace qls {

/// Tabulated radial solution v(r) with slopes, evaluated by cubic Hermite
/// interpolation and extended beyond the last node by an analytic tail.
class RadialProfile {
 public:
  enum class Tail { Algebraic, Exponential };

  RadialProfile() = default;
  /// r[0] must be 0; tail_rate is the exponential rate (ignored for Algebraic).
  RadialProfile(int N, std::vector<double> r, std::vector<double> v, std::vector<double> dv,
                Tail tail = Tail::Algebraic, double tail_rate = 0.0);

  int dimension() const { return N_; }
  const std::vector<double>& r() const { return r_; }
  const std::vector<double>& v() const { return v_; }
  const std::vector<double>& dv() const { return dv_; }
  std::size_t size() const { return r_.size(); }
  double amplitude() const { return v_.front(); }
  double r_end() const { return r_.back(); }
  Tail tail() const { return tail_; }
  double tail_rate() const { return tail_rate_; }

  double eval(double r) const;
  double derivative(double r) const;
  /// r^{N-2} v(r) at the last node.
  double tail_constant() const;
  /// -r^{N-1} v'(r) / (N-2) at the last node.
  double flux_constant() const;

  /// U((x - center)/t) on a grid; t = 0 gives the zero field. Radial grids
  /// require center 0.
  GridField sample(const GridPtr& grid, const Point& center = {}, double t = 1.0) const;

  /// Columns r, v, v_prime, r^{N-2}*v.
  void write_csv(const std::string& path) const;

 private:
  int N_ = 0;
  std::vector<double> r_, v_, dv_;
  Tail tail_ = Tail::Algebraic;
  double tail_rate_ = 0.0;
};

/// Integrals over R^N of a profile, with analytic contributions of the tail.
struct ProfileIntegrals {
  double dirichlet = 0.0;  ///< int |grad v|^2
  double source = 0.0;     ///< int |G^{-1}(v)|^p
  double mass = 0.0;       ///< int |G^{-1}(v)|^2 (infinite for slow tails)
};

ProfileIntegrals integrate_profile(const RadialProfile& profile, const Transform& transform,
                                   double p);

/// Energy and Pohozaev data of a profile for -Delta v + mass*h(v) = m f(v).
struct ProfileEnergy {
  ProfileIntegrals integrals;
  double energy = 0.0;             ///< L = D/2 + mass/2 M - m/p P
  double pohozaev_residual = 0.0;  ///< [(N-2)/(2N) D + mass/2 M - m/p P] / D
};

ProfileEnergy profile_energy(const RadialProfile& profile, const Transform& transform, double p,
                             double m, double mass = 0.0);

}  // namespace qls
