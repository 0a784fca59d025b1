#pragma once

#include <memory>
#include <vector>

#include "qls/discretization.hpp"
#include "qls/potentials.hpp"
#include "qls/radial_profile.hpp"
#include "qls/transform.hpp"

namespace qls {

/// One rescaled penalized problem on R^N in the stretched variable x:
///   Gamma(v) = 1/2 int |grad v|^2 + int [kappa/2 V(eps x)|G^{-1}(v)|^2
///              - 1/p K(eps x)|G^{-1}(v+)|^p] + (int chi v+^{p/2} - 1)_+^2.
struct Problem {
  Potentials pots;
  PenalizationConfig pen;
  double p = 4.0;
  double kappa = 1.0;
  double eps = 1.0;
  Transform transform{1.0};
};

struct EnergyReport {
  double L_m = 0.0;        ///< 1/2 D - m/p int |G^{-1}(v)|^p
  double P_eps = 0.0;
  double Q_eps = 0.0;
  double Gamma_eps = 0.0;  ///< P_eps + Q_eps
  double pohozaev_residual = 0.0;
  double gradient_norm = 0.0;     ///< dual norm of the gradient
  double dirichlet = 0.0;
  double penalty_integral = 0.0;  ///< int chi v+^{p/2}
};

/// Node-wise data of a Problem on a grid (V, K, chi at eps x) and the energy,
/// gradient and Hessian pieces built from them.
class EnergyModel {
 public:
  EnergyModel(GridPtr grid, Problem problem);
  ~EnergyModel();
  EnergyModel(EnergyModel&&) noexcept;

  const GridPtr& grid() const { return grid_; }
  const Problem& problem() const { return problem_; }
  const std::vector<double>& V() const { return V_; }
  const std::vector<double>& K() const { return K_; }
  const std::vector<double>& chi() const { return chi_; }

  double penalty_integral(const GridField& v) const;
  double gamma(const GridField& v) const;
  EnergyReport report(const GridField& v) const;
  /// Strong-form gradient: dGamma/dv_i divided by the quadrature weight; 0 on
  /// Dirichlet nodes.
  GridField gradient(const GridField& v) const;
  /// sqrt(g^T A^{-1} g) for the weak gradient g and the stiffness matrix A.
  double dual_norm(const GridField& strong_gradient) const;

  /// Weighted diagonal of the non-Dirichlet second variation (free nodes get
  /// w_i * [kappa V h'(v) - K f'(v+)] plus the diagonal penalty part).
  std::vector<double> hessian_diagonal(const GridField& v) const;
  /// Rank-one penalty part coef * u u^T of the Hessian (coef = 0 if inactive).
  double penalty_rank_one(const GridField& v, std::vector<double>& u) const;

  /// Solve A x = b on free nodes (A = stiffness); Dirichlet entries of x are 0.
  std::vector<double> solve_stiffness(const std::vector<double>& b) const;

 private:
  struct Factor;
  GridPtr grid_;
  Problem problem_;
  std::vector<double> V_, K_, chi_;
  std::unique_ptr<Factor> factor_;
};

double energy_Lm(const GridField& v, double m, double p, const Transform& transform);
/// [(N-2)/(2N) D - m/p int |G^{-1}(v)|^p] / D, 0 for the zero field.
double pohozaev_residual(const GridField& v, double m, double p, const Transform& transform);
/// Same identity with the mass and variable-coefficient terms of a Problem:
/// [(N-2)/(2N) D + kappa/2 int V|G^{-1}(v)|^2 - 1/p int K|G^{-1}(v+)|^p] / D.
double pohozaev_residual(const GridField& v, const EnergyModel& model);

EnergyReport energy_Gamma(const GridField& v, const Problem& problem);
GridField gradient_Gamma(const GridField& v, const Problem& problem);

/// Quintic smoothstep cut-off: 1 on [0, beta], 0 on [2 beta, inf).
double cutoff(double rho, double beta);

/// W(x) = phi(eps x - y) U((x - y/eps)/t) on `grid`, y = center. t = 0 gives 0.
GridField build_W(const GridPtr& grid, double eps, double t, const Point& center,
                  const PenalizationConfig& pen, const RadialProfile& ground);

struct PathLevel {
  double D_eps = 0.0;
  double argmax_t = 0.0;
  double t0 = 0.0;
  double endpoint = 0.0;  ///< Gamma at t = t0
};

/// max over s in [0,1] of Gamma(W_{eps, s t0}) by golden-section search.
PathLevel minimax_path_level(const EnergyModel& model, const RadialProfile& ground,
                             const Point& center, double t0, double tol = 1e-7);

}  // namespace qls
