#pragma once

#include <string>
#include <vector>

#include "qls/solver.hpp"

namespace qls {

enum class CheckStatus { Pass, Fail, Skip };
std::string to_string(CheckStatus s);

struct CheckResult {
  std::string name;
  std::string property;  ///< the identity or estimate the check encodes
  CheckStatus status = CheckStatus::Skip;
  double value = 0.0;
  double tolerance = 0.0;
  std::string reason;  ///< why a check was skipped or failed
};

/// What run_suite needs beyond the outcome itself.
struct SuiteContext {
  const EnergyModel* model = nullptr;
  double ground_sup = 0.0;  ///< sup norm of the limit ground state
  double C_m = 0.0;
  bool autonomous = false;  ///< V and K constant
  bool critical = false;    ///< p = 2N/(N-2), bubble fit instead of the tail plateau
  double pohozaev_tolerance = 1e-5;
  double plateau_tolerance = 0.01;
  double talenti_tolerance = 0.3;
  double sup_fraction = 0.5;
};

struct SuiteResult {
  std::vector<CheckResult> checks;
  bool passed() const;  ///< no failed check
  const CheckResult* find(const std::string& name) const;
};

/// Checks (a) Pohozaev, (b) tail plateau or bubble fit, (c) energy gap,
/// (d) sup-norm lower bound, (e) inactive penalization. Never throws for
/// numerical failures; a non-converged outcome yields skipped checks.
SuiteResult run_suite(const SolveOutcome& outcome, const SuiteContext& ctx);

/// Variation (max - min)/mean of r^{N-2} v divided by the massive Green factor
/// over the last decade of the resolved far field of a radial solve.
struct PlateauMeasure {
  double variation = 0.0;
  double r_lo = 0.0;
  double r_hi = 0.0;
  std::size_t nodes = 0;
};
PlateauMeasure tail_plateau(const GridField& v, double decay_rate);

/// (ar)^nu K_nu(ar) / (2^{nu-1} Gamma(nu)) with nu = (N-2)/2; 1 when a = 0.
double massive_green_factor(int N, double a, double r);

/// Majority trend: at least half of the consecutive differences have the
/// requested sign (strictly negative when decreasing).
struct TrendCheck {
  bool passed = false;
  std::size_t agreeing = 0;
  std::size_t pairs = 0;
};
TrendCheck majority_trend(const std::vector<double>& values, bool decreasing = true);

}  // namespace qls
