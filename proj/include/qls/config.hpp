#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "qls/potential_dsl.hpp"
#include "qls/potentials.hpp"
#include "qls/radial_shooting.hpp"
#include "qls/solver.hpp"

namespace qls {

struct ModelParams {
  int N = 5;
  double p = 4.0;
  double gamma = 2.0;
  double alpha = 0.0;  ///< critical runs only
};

struct GridSpec {
  enum class Type { Radial, Tensor };
  Type type = Type::Radial;
  // radial: geometric nodes from r_first to extent_factor * 2 beta / eps
  std::size_t nodes = 6000;
  double r_first = 1e-3;
  double extent_factor = 1.05;
  // tensor: box of half-width half_width (original coordinates) with cells per axis
  std::size_t cells = 256;
  double half_width = 2.0;
};

/// One V expression of a comparison experiment.
struct Variant {
  std::string name;
  std::string V;
};

/// Moves K continuously by a named constant from `from` to `to` at the
/// largest hbar, then continues the moved solution down the hbar sweep.
struct ControlSpec {
  std::string K;
  std::string parameter;
  double from = 0.0;
  double to = 0.0;
  int steps = 4;
  ConcentrationSet M;  ///< concentration set of the moved K
};

struct RunConfig {
  ModelParams model;
  std::string V_source = "1";
  std::string K_source = "1";
  Constants constants;
  Potentials pots;
  PenalizationConfig pen;
  GridSpec grid;
  SolveConfig solver;
  bool warm_start = true;
  ShootConfig shoot;
  std::vector<double> hbar;
  std::vector<Variant> variants;  ///< empty means the single base V
  std::optional<ControlSpec> control;
  std::string out_dir = "out";
  nlohmann::json echo;  ///< resolved configuration

  /// Potentials with V replaced by a variant source.
  Potentials with_V(const std::string& V_source) const;
};

enum class RunKind { Shoot, Solve, Sweep, Validate, Critical };

/// Parses and validates a configuration; every violation is a ConfigError
/// whose message names the offending key.
RunConfig load_config(const nlohmann::json& j, RunKind kind);
RunConfig load_config_file(const std::string& path, RunKind kind);

}  // namespace qls
