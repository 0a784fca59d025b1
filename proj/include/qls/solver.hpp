#pragma once

#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "qls/energy.hpp"

namespace qls {

enum class SolveMethod {
  /// Damped Newton on the critical-point equation with a dual-norm merit function.
  Newton,
  /// Projected H^1 gradient descent with Armijo backtracking on Gamma.
  PreconditionedDescent,
};

struct SolveConfig {
  SolveMethod method = SolveMethod::Newton;
  int max_iterations = 100;
  double gradient_tolerance = 1e-8;  ///< dual norm of the gradient
  double armijo = 1e-4;
  double min_step = 1e-10;
  /// Initialization W_{eps,t} centered at y (defaults to the representative of M).
  double init_t = 1.0;
  std::optional<Point> init_center;
  /// Number of centers sampled on M when measuring the distance to X_eps.
  int x_samples = 32;
};

struct TraceRow {
  int iteration;
  double gamma;
  double gradient_norm;
  double step;
};

struct SolveOutcome {
  GridField field;
  EnergyReport report;
  int iterations = 0;
  bool converged = false;
  double distance_to_X = 0.0;
  bool positive = false;  ///< all free nodes > 0
  std::string message;
  std::vector<TraceRow> trace;
};

class SweepAborted : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Critical point of Gamma starting from `initial` (or from W_{eps, init_t}).
/// Throws PenalizationActive if it converges with Q_eps > 0.
SolveOutcome solve(const SolveConfig& cfg, const EnergyModel& model, const RadialProfile& ground,
                   const GridField* initial = nullptr);

/// D^{1,2} distance from v to the sampled initializer set {W_{eps,1}(. ; y) : y in M}.
double distance_to_initializers(const GridField& v, const EnergyModel& model,
                                const RadialProfile& ground, int samples);

/// Location of the maximum of a field (smallest radius / lowest index on ties).
std::size_t argmax_node(const GridField& v);

/// Solve a list of problems ordered by strictly decreasing eps. With warm_start,
/// each point starts from the previous solution moved so its maximum stays at the
/// same unstretched position; otherwise each starts from W_{eps,1}. A failure at
/// the first point throws SweepAborted; later failures are recorded per point.
/// `jobs` > 1 runs cold-started points concurrently (results are identical).
std::vector<SolveOutcome> continuation_sweep(const SolveConfig& cfg,
                                             const std::vector<const EnergyModel*>& models,
                                             const RadialProfile& ground, bool warm_start,
                                             int jobs = 1);
/// Same with one initialization profile per point.
std::vector<SolveOutcome> continuation_sweep(const SolveConfig& cfg,
                                             const std::vector<const EnergyModel*>& models,
                                             const std::vector<const RadialProfile*>& grounds,
                                             bool warm_start, int jobs = 1);

/// Previous solution resampled onto the next problem's grid, moved so that its
/// maximum keeps the same unstretched position.
GridField warm_start_field(const GridField& previous, double previous_eps,
                           const EnergyModel& next);

}  // namespace qls
