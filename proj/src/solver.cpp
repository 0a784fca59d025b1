#include "qls/solver.hpp"

#include <Eigen/SparseCholesky>
#include <Eigen/SparseLU>
#include <cmath>
#include <future>

#include "qls/errors.hpp"
#include "sparse.hpp"

namespace qls {

namespace {

std::vector<double> weak_of(const GridField& strong) {
  const auto& w = strong.grid()->weights();
  std::vector<double> out(strong.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = w[i] * strong[i];
  return out;
}

// Solves (A + diag + coef u u^T) x = b on free nodes.
bool newton_direction(const EnergyModel& model, const GridField& v, const std::vector<double>& b,
                      std::vector<double>& x) {
  const Grid& g = *model.grid();
  const detail::FreeIndex idx(g);
  const std::vector<double> diag = model.hessian_diagonal(v);
  std::vector<double> u;
  const double coef = model.penalty_rank_one(v, u);
  const Eigen::SparseMatrix<double> H = detail::assemble(g, idx, &diag);

  Eigen::VectorXd rhs(idx.size()), ru(idx.size());
  for (long k = 0; k < idx.size(); ++k) {
    rhs[k] = b[idx.node_of[k]];
    ru[k] = u[idx.node_of[k]];
  }
  Eigen::VectorXd y, z;
  bool ok = false;
  {
    Eigen::SimplicialLDLT<Eigen::SparseMatrix<double>> ldlt(H);
    if (ldlt.info() == Eigen::Success) {
      y = ldlt.solve(rhs);
      if (coef != 0.0) z = ldlt.solve(ru);
      ok = y.allFinite() && (coef == 0.0 || z.allFinite());
    }
  }
  if (!ok) {
    Eigen::SparseLU<Eigen::SparseMatrix<double>> lu;
    lu.analyzePattern(H);
    lu.factorize(H);
    if (lu.info() != Eigen::Success) return false;
    y = lu.solve(rhs);
    if (coef != 0.0) z = lu.solve(ru);
    if (!y.allFinite() || (coef != 0.0 && !z.allFinite())) return false;
  }
  if (coef != 0.0) {
    const double denom = 1.0 + coef * ru.dot(z);
    if (denom == 0.0) return false;
    y -= (coef * ru.dot(y) / denom) * z;
  }
  x.assign(g.size(), 0.0);
  for (long k = 0; k < idx.size(); ++k) x[idx.node_of[k]] = y[k];
  return true;
}

GridField project(const GridField& v, const std::vector<double>& dir, double alpha) {
  GridField out(v.grid());
  for (std::size_t i = 0; i < v.size(); ++i)
    out[i] = v.grid()->fixed(i) ? 0.0 : std::max(0.0, v[i] + alpha * dir[i]);
  return out;
}

std::vector<Point> initializer_centers(const EnergyModel& model, int samples) {
  const auto& M = model.problem().pots.M;
  if (model.grid()->is_radial() || M.shape == ConcentrationSet::Shape::Point || M.radius == 0.0)
    return {M.representative()};
  std::vector<Point> out;
  const int dim = model.grid()->dimension();
  for (int k = 0; k < samples; ++k) {
    Point p;
    const double th = 2.0 * M_PI * k / samples;
    p.x = M.center;
    p.x[0] += M.radius * std::cos(th);
    p.x[1] += M.radius * std::sin(th);
    if (dim < 3) p.x[2] = 0.0;
    p.r = std::sqrt(p.x[0] * p.x[0] + p.x[1] * p.x[1] + p.x[2] * p.x[2]);
    out.push_back(p);
  }
  return out;
}

}  // namespace

std::size_t argmax_node(const GridField& v) {
  const Grid& g = *v.grid();
  std::size_t best = 0;
  for (std::size_t i = 1; i < v.size(); ++i) {
    if (v[i] > v[best] || (v[i] == v[best] && g.node(i).r < g.node(best).r)) best = i;
  }
  return best;
}

double distance_to_initializers(const GridField& v, const EnergyModel& model,
                                const RadialProfile& ground, int samples) {
  const Problem& pb = model.problem();
  double best = INFINITY;
  for (const Point& y : initializer_centers(model, samples)) {
    const GridField W = build_W(model.grid(), pb.eps, 1.0, y, pb.pen, ground);
    best = std::min(best, distance_d12(v, W));
  }
  return best;
}

SolveOutcome solve(const SolveConfig& cfg, const EnergyModel& model, const RadialProfile& ground,
                   const GridField* initial) {
  if (!(cfg.gradient_tolerance > 0.0)) throw UsageError("gradient tolerance must be positive");
  const Problem& pb = model.problem();
  GridField v;
  if (initial) {
    if (initial->grid() != model.grid()) throw UsageError("initial field on a different grid");
    v = *initial;
  } else {
    const Point y = cfg.init_center ? *cfg.init_center : pb.pots.M.representative();
    v = build_W(model.grid(), pb.eps, cfg.init_t, y, pb.pen, ground);
  }
  v = project(v, std::vector<double>(v.size(), 0.0), 0.0);

  SolveOutcome out;
  GridField grad = model.gradient(v);
  double gn = model.dual_norm(grad);
  double gamma = model.gamma(v);
  out.trace.push_back({0, gamma, gn, 0.0});
  int it = 0;
  for (; it < cfg.max_iterations && gn > cfg.gradient_tolerance; ++it) {
    const std::vector<double> weak = weak_of(grad);
    std::vector<double> dir;
    if (cfg.method == SolveMethod::Newton) {
      std::vector<double> minus(weak.size());
      for (std::size_t i = 0; i < weak.size(); ++i) minus[i] = -weak[i];
      if (!newton_direction(model, v, minus, dir)) {
        out.message = "Newton system could not be solved";
        break;
      }
    } else {
      dir = model.solve_stiffness(weak);
      for (double& d : dir) d = -d;
    }
    // Backtracking: Newton minimizes the merit gn^2/2, descent minimizes Gamma.
    double alpha = 1.0;
    bool accepted = false;
    double slope = 0.0;
    for (std::size_t i = 0; i < weak.size(); ++i) slope += weak[i] * dir[i];
    while (alpha >= cfg.min_step) {
      GridField trial = project(v, dir, alpha);
      const GridField tg = model.gradient(trial);
      const double tn = model.dual_norm(tg);
      bool ok;
      double tgamma = 0.0;
      if (cfg.method == SolveMethod::Newton) {
        ok = std::isfinite(tn) && 0.5 * tn * tn <= (1.0 - 2.0 * cfg.armijo * alpha) * 0.5 * gn * gn;
        if (ok) tgamma = model.gamma(trial);
      } else {
        tgamma = model.gamma(trial);
        ok = std::isfinite(tgamma) && tgamma <= gamma + cfg.armijo * alpha * slope;
      }
      if (ok) {
        v = std::move(trial);
        grad = tg;
        gn = tn;
        gamma = tgamma;
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      out.message = "line search failed";
      break;
    }
    out.trace.push_back({it + 1, gamma, gn, alpha});
  }
  out.iterations = it;
  out.converged = gn <= cfg.gradient_tolerance;
  if (out.message.empty() && !out.converged) out.message = "iteration limit reached";
  out.field = v;
  out.report = model.report(v);
  out.positive = true;
  for (std::size_t i = 0; i < v.size(); ++i)
    if (!model.grid()->fixed(i) && !(v[i] > 0.0)) out.positive = false;
  out.distance_to_X = distance_to_initializers(v, model, ground, cfg.x_samples);
  if (out.converged && out.report.Q_eps > 0.0)
    throw PenalizationActive("converged with an active penalization (eps too large or tau/beta misconfigured)",
                             out.report.Q_eps);
  if (out.converged) out.message = "converged";
  return out;
}

GridField warm_start_field(const GridField& previous, double previous_eps,
                           const EnergyModel& next) {
  const Point peak = previous.grid()->node(argmax_node(previous));
  const double ratio = previous_eps / next.problem().eps;
  Point shift;
  for (int d = 0; d < 3; ++d) shift.x[d] = peak.x[d] * (ratio - 1.0);
  const bool radial = next.grid()->is_radial();
  return resample(previous, next.grid(),
                  [&](const Point& y) {
                    if (radial) return y;
                    Point q = y;
                    for (int d = 0; d < 3; ++d) q.x[d] -= shift.x[d];
                    return q;
                  },
                  true);
}

std::vector<SolveOutcome> continuation_sweep(const SolveConfig& cfg,
                                             const std::vector<const EnergyModel*>& models,
                                             const RadialProfile& ground, bool warm_start,
                                             int jobs) {
  return continuation_sweep(cfg, models, std::vector<const RadialProfile*>(models.size(), &ground),
                            warm_start, jobs);
}

std::vector<SolveOutcome> continuation_sweep(const SolveConfig& cfg,
                                             const std::vector<const EnergyModel*>& models,
                                             const std::vector<const RadialProfile*>& grounds,
                                             bool warm_start, int jobs) {
  if (grounds.size() != models.size()) throw UsageError("one ground profile per sweep point is required");
  for (std::size_t k = 1; k < models.size(); ++k)
    if (!(models[k]->problem().eps < models[k - 1]->problem().eps))
      throw UsageError("continuation sweep needs strictly decreasing eps");
  std::vector<SolveOutcome> out(models.size());
  auto run_one = [&](std::size_t k, const GridField* init) {
    SolveOutcome o;
    try {
      o = solve(cfg, *models[k], *grounds[k], init);
    } catch (const std::exception& e) {
      o.converged = false;
      o.message = e.what();
    }
    return o;
  };
  if (models.empty()) return out;
  out[0] = run_one(0, nullptr);
  if (!out[0].converged) throw SweepAborted("first sweep point failed: " + out[0].message);
  if (warm_start) {
    for (std::size_t k = 1; k < models.size(); ++k) {
      const SolveOutcome& prev = out[k - 1];
      if (prev.converged) {
        const GridField init = warm_start_field(prev.field, models[k - 1]->problem().eps, *models[k]);
        out[k] = run_one(k, &init);
      } else {
        out[k] = run_one(k, nullptr);
      }
    }
  } else if (jobs > 1) {
    std::vector<std::future<SolveOutcome>> fut;
    for (std::size_t k = 1; k < models.size(); ++k) {
      if (fut.size() >= static_cast<std::size_t>(jobs)) {
        // Bounded fan-out: wait for the oldest outstanding point.
        const std::size_t done = k - fut.size();
        out[done] = fut.front().get();
        fut.erase(fut.begin());
      }
      fut.push_back(std::async(std::launch::async, run_one, k, nullptr));
    }
    const std::size_t first = models.size() - fut.size();
    for (std::size_t j = 0; j < fut.size(); ++j) out[first + j] = fut[j].get();
  } else {
    for (std::size_t k = 1; k < models.size(); ++k) out[k] = run_one(k, nullptr);
  }
  return out;
}

}  // namespace qls
