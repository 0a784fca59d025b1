#pragma once

#include <string>
#include <vector>

#include "qls/radial_profile.hpp"
#include "qls/solver.hpp"

namespace qls {

/// v(x) = hbar^{gamma/2} u(eps x) with kappa = hbar^{(p-2)gamma/2} and
/// eps = hbar^{1+(p-2)gamma/4}; kappa and eps are always derived.
struct RescaleMap {
  double hbar = 1.0;
  double gamma = 1.0;
  double p = 4.0;

  void validate() const;
  double kappa() const;
  double eps() const;
  double amplitude_factor() const;  ///< hbar^{gamma/2}
};

/// Critical exponent p = 2N/(N-2) with 0 < alpha < gamma:
/// lambda = hbar^{(p-2)alpha/2}, zeta = hbar^{gamma-alpha}, eps = hbar^{1+(p-2)alpha/4}.
struct CriticalRescaleMap {
  double hbar = 1.0;
  double gamma = 1.0;
  double alpha = 0.5;
  int N = 5;

  double p() const { return 2.0 * N / (N - 2.0); }
  void validate() const;
};

struct CriticalParams {
  double lambda = 1.0;
  double zeta = 1.0;
  double eps = 1.0;
};

CriticalParams critical_params(const CriticalRescaleMap& map);

/// u on a grid in original coordinates -> v on `target` (stretched coordinates).
GridField rescale_forward(const RescaleMap& map, const GridField& u, const GridPtr& target);
/// v on a grid in stretched coordinates -> u on `target` (original coordinates).
GridField rescale_backward(const RescaleMap& map, const GridField& v, const GridPtr& target);

/// D^{1,2}(R^N) distance between v (zero outside the grid) and U((x - center)):
/// grid energy of v - U with U's own values on the Dirichlet nodes, plus the
/// energy of U outside the grid for radial grids (tensor grids neglect it).
double profile_distance_d12(const GridField& v, const RadialProfile& U, const Point& center = {});

struct ConcentrationReport {
  Point x_hbar;                 ///< maximum point in original coordinates
  Point x_stretched;            ///< maximum point in stretched coordinates
  double dist_to_M = 0.0;
  double profile_error_d12 = 0.0;
  double profile_error_rel = 0.0;  ///< profile_error_d12 / ||U||
  double tail_xi_fit = 0.0;     ///< least-squares decay rate of log v in units of sqrt(kappa)
  double tail_xi = 0.0;         ///< admissible comparison rate (4 xi^2 < V0, xi <= fit)
  bool tail_rate_admissible = false;
  bool tail_dominated = false;  ///< C exp(-xi sqrt(kappa) rho) >= v on the fit window
  std::size_t tail_window_nodes = 0;
  double energy_gap = 0.0;
  double penalty_integral = 0.0;
  bool Q_active = false;
};

/// Concentration data of a converged outcome. `limit` is the limit ground state
/// in stretched coordinates and C_m its energy. Throws UsageError for
/// non-converged outcomes.
ConcentrationReport concentration_report(const SolveOutcome& outcome, const EnergyModel& model,
                                         const RadialProfile& limit, double C_m,
                                         int search_cells = 2);

/// Least-squares fit of log v against rho = |x - center| on the window where v
/// lies in [lo * max, hi * max]; returns the (negative) slope and the window size.
struct TailFit {
  double slope = 0.0;
  double intercept = 0.0;
  double rho_start = 0.0;
  std::size_t nodes = 0;
};
TailFit fit_tail(const GridField& v, const Point& center, double hi = 1e-3, double lo = 1e-8);

struct CriticalFit {
  double mu = 0.0;             ///< from the peak value
  double mu_half_width = 0.0;  ///< from the radius where v = peak/2
  double linf_rel_error = 0.0; ///< max |v - T_mu| / T_mu(0) on r <= 10/mu
};

/// Fit of a radial field to the critical family with constant m.
CriticalFit critical_profile_fit(const GridField& w, double m);
CriticalFit critical_profile_fit(const RadialProfile& w, double m);

/// mu at which the bubble family best balances a small mass lambda V0 against a
/// small quasilinear coefficient zeta: mu^N = 3 lambda V0 I2 / ((N-2) m zeta I4)
/// with I2 = int T_1^2 and I4 = int T_1^{2*+2} for the mu = 1 bubble.
double critical_mu_prediction(int N, double m, double lambda, double V0, double zeta);

/// Tabulated bubble as a RadialProfile (geometric nodes to r_max, algebraic tail).
RadialProfile talenti_profile(int N, double m, double mu, double r_max = 1e6,
                              std::size_t nodes = 4001);

}  // namespace qls
