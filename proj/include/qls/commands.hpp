#pragma once

#include <string>
#include <vector>

#include "qls/config.hpp"
#include "qls/diagnostics.hpp"
#include "qls/semiclassical.hpp"

namespace qls {

struct CliOptions {
  std::string out_dir;  ///< overrides outputs.directory when set
  int jobs = 1;
  bool verbose = false;
};

/// One solved (variant, hbar) point of a subcritical sweep.
struct SweepPoint {
  std::string variant;
  double hbar = 0.0;
  double kappa = 0.0;
  double eps = 0.0;
  bool converged = false;
  int iterations = 0;
  std::string message;
  double gamma = 0.0;
  double gradient_norm = 0.0;
  double sup_norm = 0.0;
  double distance_to_X = 0.0;
  bool positive = false;
  double C_m = 0.0;
  EnergyReport energy;
  ConcentrationReport report;
  SuiteResult suite;
  GridField field;
  std::vector<TraceRow> trace;
};

struct SweepResult {
  std::vector<std::string> variants;  ///< in run order; "control" last when present
  std::vector<SweepPoint> points;
  double cell = 0.0;        ///< grid spacing in original coordinates (tensor grids)
  double ground_sup = 0.0;  ///< sup of the limit profile used for check (d)
  bool all_converged() const;
  bool all_checks_passed() const;
  std::vector<const SweepPoint*> of(const std::string& variant) const;
};

/// Runs every V variant (or the base V) over the hbar list with continuation,
/// then the K-shift control when configured. Assumption (V) is checked per variant.
SweepResult run_sweep(const RunConfig& cfg, int jobs = 1);

struct CriticalPoint {
  double hbar = 0.0;
  CriticalParams params;
  double mu_pred = 0.0;
  bool converged = false;
  int iterations = 0;
  std::string message;
  double gamma = 0.0;
  double pohozaev_residual = 0.0;
  CriticalFit fit;
  SuiteResult suite;
  GridField field;
};

std::vector<CriticalPoint> run_critical_sweep(const RunConfig& cfg, int jobs = 1);

/// Exit codes: 0 success, 1 assumption/config violation, 2 numerical failure.
int cmd_shoot(const RunConfig& cfg, const CliOptions& opt);
int cmd_solve(const RunConfig& cfg, const CliOptions& opt);
int cmd_sweep(const RunConfig& cfg, const CliOptions& opt);
int cmd_validate(const RunConfig& cfg, const CliOptions& opt);
int cmd_critical_sweep(const RunConfig& cfg, const CliOptions& opt);

}  // namespace qls
