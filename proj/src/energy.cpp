#include "qls/energy.hpp"

#include <Eigen/SparseCholesky>
#include <cmath>

#include "qls/closed_form.hpp"
#include "qls/errors.hpp"
#include "sparse.hpp"

namespace qls {

struct EnergyModel::Factor {
  detail::FreeIndex idx;
  Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt;
  explicit Factor(const Grid& g) : idx(g) {
    ldlt.compute(detail::assemble(g, idx));
    if (ldlt.info() != Eigen::Success) throw UsageError("stiffness factorization failed");
  }
};

EnergyModel::EnergyModel(GridPtr grid, Problem problem)
    : grid_(std::move(grid)), problem_(std::move(problem)) {
  const Grid& g = *grid_;
  const double eps = problem_.eps;
  if (!(eps > 0.0) || !(problem_.kappa >= 0.0)) throw DomainError("eps must be positive, kappa nonnegative");
  if (g.is_radial()) {
    if (!problem_.pots.radial_only())
      throw UsageError("radial grids need potentials that depend on r only");
    const auto& c = problem_.pen.O.center;
    if (c[0] != 0.0 || c[1] != 0.0 || c[2] != 0.0)
      throw UsageError("radial grids need the region O centered at the origin");
  }
  const double chi_out = std::pow(eps, -problem_.pen.tau);
  V_.resize(g.size());
  K_.resize(g.size());
  chi_.resize(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    Point y = g.node(i);
    y.r *= eps;
    for (double& c : y.x) c *= eps;
    V_[i] = problem_.pots.V(y);
    K_[i] = problem_.pots.K(y);
    chi_[i] = problem_.pen.O.contains(y) ? 0.0 : chi_out;
  }
  factor_ = std::make_unique<Factor>(g);
}

EnergyModel::~EnergyModel() = default;
EnergyModel::EnergyModel(EnergyModel&&) noexcept = default;

double EnergyModel::penalty_integral(const GridField& v) const {
  const auto& w = grid_->weights();
  const double half = 0.5 * problem_.p;
  double I = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (chi_[i] > 0.0 && v[i] > 0.0) I += w[i] * chi_[i] * std::pow(v[i], half);
  return I;
}

double EnergyModel::gamma(const GridField& v) const { return report(v).Gamma_eps; }

EnergyReport EnergyModel::report(const GridField& v) const {
  if (v.grid() != grid_) throw UsageError("field lives on a different grid than the model");
  const auto& w = grid_->weights();
  const Transform& tr = problem_.transform;
  const double p = problem_.p, kappa = problem_.kappa, m = problem_.pots.m;
  EnergyReport r;
  r.dirichlet = dirichlet_energy(v);
  double mass = 0.0, source = 0.0, free_source = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] == 0.0) continue;
    const double u = tr.G_inverse(v[i]);
    const double up = std::pow(std::abs(u), p);
    mass += w[i] * V_[i] * u * u;
    if (v[i] > 0.0) source += w[i] * K_[i] * up;
    free_source += w[i] * up;
  }
  r.P_eps = 0.5 * r.dirichlet + 0.5 * kappa * mass - source / p;
  r.penalty_integral = penalty_integral(v);
  const double excess = std::max(0.0, r.penalty_integral - 1.0);
  r.Q_eps = excess * excess;
  r.Gamma_eps = r.P_eps + r.Q_eps;
  r.L_m = 0.5 * r.dirichlet - m / p * free_source;
  const double N = grid_->dimension();
  r.pohozaev_residual =
      r.dirichlet > 0.0
          ? ((N - 2) / (2 * N) * r.dirichlet + 0.5 * kappa * mass - source / p) / r.dirichlet
          : 0.0;
  r.gradient_norm = dual_norm(gradient(v));
  return r;
}

GridField EnergyModel::gradient(const GridField& v) const {
  if (v.grid() != grid_) throw UsageError("field lives on a different grid than the model");
  const Grid& g = *grid_;
  const auto& w = g.weights();
  const Transform& tr = problem_.transform;
  const double p = problem_.p, kappa = problem_.kappa;
  GridField out(grid_);
  for (const Edge& e : g.edges()) {
    const double f = e.c * (v[e.i] - v[e.j]);
    out[e.i] += f;
    out[e.j] -= f;
  }
  const double excess = std::max(0.0, penalty_integral(v) - 1.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (g.fixed(i)) {
      out[i] = 0.0;
      continue;
    }
    double s = out[i] / w[i];
    if (v[i] != 0.0) s += kappa * V_[i] * tr.mass_term(v[i]);
    if (v[i] > 0.0) {
      s -= K_[i] * tr.source_term(v[i], p);
      if (excess > 0.0 && chi_[i] > 0.0) s += p * excess * chi_[i] * std::pow(v[i], 0.5 * p - 1.0);
    }
    out[i] = s;
  }
  return out;
}

std::vector<double> EnergyModel::solve_stiffness(const std::vector<double>& b) const {
  const auto& idx = factor_->idx;
  Eigen::VectorXd rhs(idx.size());
  for (long k = 0; k < idx.size(); ++k) rhs[k] = b[idx.node_of[k]];
  const Eigen::VectorXd x = factor_->ldlt.solve(rhs);
  std::vector<double> out(b.size(), 0.0);
  for (long k = 0; k < idx.size(); ++k) out[idx.node_of[k]] = x[k];
  return out;
}

double EnergyModel::dual_norm(const GridField& strong) const {
  const auto& w = grid_->weights();
  std::vector<double> weak(strong.size());
  for (std::size_t i = 0; i < weak.size(); ++i) weak[i] = w[i] * strong[i];
  const std::vector<double> x = solve_stiffness(weak);
  double s = 0.0;
  for (std::size_t i = 0; i < weak.size(); ++i) s += weak[i] * x[i];
  return std::sqrt(std::max(0.0, s));
}

std::vector<double> EnergyModel::hessian_diagonal(const GridField& v) const {
  const Grid& g = *grid_;
  const auto& w = g.weights();
  const Transform& tr = problem_.transform;
  const double p = problem_.p, kappa = problem_.kappa;
  const double excess = std::max(0.0, penalty_integral(v) - 1.0);
  std::vector<double> d(v.size(), 0.0);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (g.fixed(i)) continue;
    double s = kappa * V_[i] * tr.mass_term_derivative(v[i]);
    if (v[i] > 0.0) {
      s -= K_[i] * tr.source_term_derivative(v[i], p);
      if (excess > 0.0 && chi_[i] > 0.0)
        s += p * (0.5 * p - 1.0) * excess * chi_[i] * std::pow(v[i], 0.5 * p - 2.0);
    }
    d[i] = w[i] * s;
  }
  return d;
}

double EnergyModel::penalty_rank_one(const GridField& v, std::vector<double>& u) const {
  const auto& w = grid_->weights();
  const double p = problem_.p;
  u.assign(v.size(), 0.0);
  if (penalty_integral(v) <= 1.0) return 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!grid_->fixed(i) && chi_[i] > 0.0 && v[i] > 0.0)
      u[i] = w[i] * chi_[i] * 0.5 * p * std::pow(v[i], 0.5 * p - 1.0);
  return 2.0;
}

double energy_Lm(const GridField& v, double m, double p, const Transform& transform) {
  const auto& w = v.grid()->weights();
  double source = 0.0;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] != 0.0) source += w[i] * transform.source_potential(v[i], p);
  return 0.5 * dirichlet_energy(v) - m / p * source;
}

double pohozaev_residual(const GridField& v, double m, double p, const Transform& transform) {
  const double D = dirichlet_energy(v);
  if (D == 0.0) return 0.0;
  const double N = v.grid()->dimension();
  const double L = energy_Lm(v, m, p, transform);
  const double source_part = 0.5 * D - L;  // m/p int |G^{-1}(v)|^p
  return ((N - 2) / (2 * N) * D - source_part) / D;
}

double pohozaev_residual(const GridField& v, const EnergyModel& model) {
  return model.report(v).pohozaev_residual;
}

EnergyReport energy_Gamma(const GridField& v, const Problem& problem) {
  return EnergyModel(v.grid(), problem).report(v);
}

GridField gradient_Gamma(const GridField& v, const Problem& problem) {
  return EnergyModel(v.grid(), problem).gradient(v);
}

double cutoff(double rho, double beta) {
  if (rho <= beta) return 1.0;
  if (rho >= 2.0 * beta) return 0.0;
  const double s = (rho - beta) / beta;
  return 1.0 - s * s * s * (10.0 + s * (-15.0 + 6.0 * s));
}

GridField build_W(const GridPtr& grid, double eps, double t, const Point& center,
                  const PenalizationConfig& pen, const RadialProfile& ground) {
  if (!(eps > 0.0)) throw DomainError("eps must be positive");
  if (!(t >= 0.0)) throw DomainError("dilation t must be nonnegative");
  GridField W(grid);
  if (t == 0.0) return W;
  const Grid& g = *grid;
  Point shift;  // y / eps in grid coordinates
  for (int d = 0; d < 3; ++d) shift.x[d] = center.x[d] / eps;
  if (g.is_radial()) {
    if (center.x != std::array<double, 3>{0, 0, 0})
      throw DomainError("radial grids only support a center at the origin");
    if (2.0 * pen.beta / eps > g.extent() * (1.0 + 1e-12))
      throw DomainError("cut-off support 2 beta/eps exceeds the radial grid");
  } else {
    for (int d = 0; d < g.dimension(); ++d)
      if (std::abs(shift.x[d]) > g.extent()) throw DomainError("center/eps lies outside the grid");
  }
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (g.fixed(i)) continue;
    const double rho = g.is_radial() ? g.node(i).r : distance(g.node(i), shift);
    const double phi = cutoff(eps * rho, pen.beta);
    if (phi == 0.0) continue;
    W[i] = phi * ground.eval(rho / t);
  }
  return W;
}

PathLevel minimax_path_level(const EnergyModel& model, const RadialProfile& ground,
                             const Point& center, double t0, double tol) {
  const Problem& pb = model.problem();
  auto level = [&](double s) {
    return model.report(build_W(model.grid(), pb.eps, s * t0, center, pb.pen, ground)).Gamma_eps;
  };
  const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = 0.0, b = 1.0;
  double c = b - phi * (b - a), d = a + phi * (b - a);
  double fc = level(c), fd = level(d);
  while (b - a > tol) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - phi * (b - a);
      fc = level(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + phi * (b - a);
      fd = level(d);
    }
  }
  PathLevel out;
  const double s = fc > fd ? c : d;
  out.D_eps = std::max(fc, fd);
  out.argmax_t = s * t0;
  out.t0 = t0;
  out.endpoint = level(1.0);
  return out;
}

}  // namespace qls
