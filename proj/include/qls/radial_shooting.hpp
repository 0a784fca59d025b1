#pragma once

#include <utility>
#include <vector>

#include "qls/radial_profile.hpp"
#include "qls/transform.hpp"

namespace qls {

/// Radial problem v'' + (N-1)/r v' = mass * h(v) - m f(v) with h = G^{-1}/g(G^{-1})
/// and f = |G^{-1}|^{p-2} G^{-1}/g(G^{-1}). mass = 0 is the zero-mass problem whose
/// positive solutions decay like the fundamental solution.
struct ShootConfig {
  int N = 5;
  double p = 4.0;
  double m = 1.0;
  double zeta = 1.0;
  double mass = 0.0;
  double r_max = 1e3;
  double tol_amplitude = 1e-13;
  double rtol = 1e-12;
  double scan_min = 1e-4;
  double scan_max = 1e4;
  int scan_per_decade = 4;
  std::size_t profile_nodes = 10001;
  /// Amplitude returned when every scanned amplitude is a fast-decay solution
  /// (scale-invariant critical family).
  double preferred_amplitude = 1.0;

  void validate() const;
  Transform transform() const { return Transform(zeta); }
};

/// Samples of one shooting run at the requested radii, stopped early at events.
struct Trajectory {
  double amplitude = 0.0;
  int N = 0;
  std::vector<double> r, v, dv;
  bool crossed = false;      ///< v reached 0
  double crossing_r = 0.0;
  bool certified = false;    ///< r^{N-2}(v + r v'/(N-2)) < 0: a crossing must follow
  bool rebound = false;      ///< v' > 0 while v > 0 (massive problems)
  double r_end = 0.0;        ///< last radius integrated
  std::size_t steps = 0;
};

enum class Outcome { Crossing, SlowDecay, FastDecay, Rebound };

const char* to_string(Outcome o);

/// Integrate from the analytic series at the origin up to cfg.r_max or the first
/// event. `samples` geometric output radii are recorded (plus r = 0).
Trajectory integrate_radial(const ShootConfig& cfg, double amplitude, std::size_t samples = 400);

/// Crossing / SlowDecay / FastDecay for zero mass; Crossing / Rebound for mass > 0.
/// Throws UndecidedError when the horizon is too short to see any decay.
Outcome classify(const Trajectory& traj, const ShootConfig& cfg);

struct ShootResult {
  double amplitude = 0.0;
  RadialProfile profile;
  double decay_c = 0.0;       ///< lim r^{N-2} v
  double decay_c_flux = 0.0;  ///< lim -r^{N-1} v'/(N-2)
  double plateau_variation = 0.0;
  ProfileEnergy energy;
  std::vector<std::pair<double, Outcome>> trace;
  bool scale_invariant = false;
};

/// Amplitude scan over [scan_min, scan_max] followed by bisection between the two
/// regimes. Throws BracketError when no sign change is found or when the bracket
/// does not persist on a longer horizon.
ShootResult find_ground_state(const ShootConfig& cfg);

/// Bisection restricted to an explicit bracket [lo, hi] (both must be decided and
/// of different type).
ShootResult find_ground_state_in(const ShootConfig& cfg, double lo, double hi);

}  // namespace qls
