#include "qls/config.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "qls/errors.hpp"

namespace qls {

using nlohmann::json;

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback, const std::string& where) {
  if (!j.contains(key)) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const json::exception&) {
    throw ConfigError(where + "." + key + ": wrong type");
  }
}

std::array<double, 3> point3(const json& j, const std::string& where) {
  std::array<double, 3> out{0.0, 0.0, 0.0};
  if (!j.is_array() || j.size() > 3) throw ConfigError(where + ": expected an array of up to 3 numbers");
  for (std::size_t i = 0; i < j.size(); ++i) {
    if (!j[i].is_number()) throw ConfigError(where + ": expected numbers");
    out[i] = j[i].get<double>();
  }
  return out;
}

ConcentrationSet concentration_set(const json& j, const std::string& where) {
  ConcentrationSet M;
  const std::string shape = get_or<std::string>(j, "shape", "point", where);
  if (shape == "point") {
    M.shape = ConcentrationSet::Shape::Point;
  } else if (shape == "sphere") {
    M.shape = ConcentrationSet::Shape::Sphere;
  } else {
    throw ConfigError(where + ".shape: expected \"point\" or \"sphere\"");
  }
  if (j.contains("center")) M.center = point3(j["center"], where + ".center");
  M.radius = get_or<double>(j, "radius", 0.0, where);
  if (M.radius < 0.0) throw ConfigError(where + ".radius must be nonnegative");
  return M;
}

void reject_unknown(const json& j, std::initializer_list<const char*> keys, const std::string& where) {
  if (!j.is_object()) throw ConfigError(where + ": expected an object");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : keys) known = known || it.key() == k;
    if (!known) throw ConfigError(where + ": unknown key \"" + it.key() + "\"");
  }
}

Expr parse_checked(const std::string& src, const Constants& c, const std::string& where) {
  try {
    return parse(src, c);
  } catch (const ParseError& e) {
    throw ConfigError(where + ": " + e.what());
  }
}

std::vector<double> hbar_list(const json& s) {
  reject_unknown(s, {"hbar", "log_range"}, "sweep");
  std::vector<double> out;
  if (s.contains("hbar")) {
    if (!s["hbar"].is_array()) throw ConfigError("sweep.hbar: expected an array");
    for (const auto& v : s["hbar"]) {
      if (!v.is_number()) throw ConfigError("sweep.hbar: expected numbers");
      out.push_back(v.get<double>());
    }
  } else if (s.contains("log_range")) {
    const json& r = s["log_range"];
    reject_unknown(r, {"from", "to", "count"}, "sweep.log_range");
    const double a = get_or<double>(r, "from", 0.0, "sweep.log_range");
    const double b = get_or<double>(r, "to", 0.0, "sweep.log_range");
    const int n = get_or<int>(r, "count", 0, "sweep.log_range");
    if (!(a > 0.0 && b > 0.0) || n < 1) throw ConfigError("sweep.log_range: needs from, to > 0 and count >= 1");
    for (int k = 0; k < n; ++k)
      out.push_back(n == 1 ? a : a * std::pow(b / a, static_cast<double>(k) / (n - 1)));
  }
  if (out.empty()) throw ConfigError("sweep: the hbar list is empty");
  for (std::size_t k = 0; k < out.size(); ++k) {
    if (!(out[k] > 0.0 && out[k] <= 1.0)) throw ConfigError("sweep.hbar: values must lie in (0, 1]");
    if (k > 0 && !(out[k] < out[k - 1])) throw ConfigError("sweep.hbar: values must be strictly decreasing");
  }
  return out;
}

}  // namespace

Potentials RunConfig::with_V(const std::string& V_source) const {
  Potentials p = pots;
  p.V = parse_checked(V_source, constants, "variant V");
  return p;
}

RunConfig load_config(const json& j, RunKind kind) {
  reject_unknown(j, {"model", "potentials", "penalization", "grid", "solver", "shoot", "sweep",
                     "variants", "control", "outputs"},
                 "config");
  RunConfig c;

  const json model = j.value("model", json::object());
  reject_unknown(model, {"N", "p", "gamma", "alpha"}, "model");
  c.model.N = get_or<int>(model, "N", 5, "model");
  const int N = c.model.N;
  if (N < 2) throw ConfigError("model.N must be at least 2");
  c.model.gamma = get_or<double>(model, "gamma", 2.0, "model");
  if (!(c.model.gamma > 0.0)) throw ConfigError("model.gamma must be positive");
  if (kind == RunKind::Critical) {
    if (N < 5) throw ConfigError("model.N must be at least 5 for the critical pipeline");
    c.model.p = 2.0 * N / (N - 2.0);
    if (model.contains("p") && std::abs(model["p"].get<double>() - c.model.p) > 1e-12)
      throw ConfigError("model.p must equal 2N/(N-2) for the critical pipeline");
    if (!model.contains("alpha")) throw ConfigError("model.alpha is required for the critical pipeline");
    c.model.alpha = model["alpha"].get<double>();
    if (!(c.model.alpha > 0.0 && c.model.alpha < c.model.gamma))
      throw ConfigError("model.alpha must satisfy 0 < alpha < gamma (alpha = gamma is not allowed)");
  } else {
    c.model.p = get_or<double>(model, "p", 4.0, "model");
    if (N >= 3) {
      const double crit = 2.0 * N / (N - 2.0);
      const bool shoot_only = kind == RunKind::Shoot || kind == RunKind::Validate;
      if (!(shoot_only ? c.model.p >= crit : c.model.p > crit) || !(c.model.p < 2.0 * crit))
        throw ConfigError("model.p must lie in " + std::string(shoot_only ? "[" : "(") +
                          "2N/(N-2), 4N/(N-2)) for N = " + std::to_string(N));
    } else if (!(c.model.p > 2.0)) {
      throw ConfigError("model.p must exceed 2");
    }
  }

  const json pot = j.value("potentials", json::object());
  reject_unknown(pot, {"V", "K", "constants", "m", "K0", "V0", "M", "O"}, "potentials");
  if (pot.contains("constants")) {
    if (!pot["constants"].is_object()) throw ConfigError("potentials.constants: expected an object");
    for (auto it = pot["constants"].begin(); it != pot["constants"].end(); ++it) {
      if (!it->is_number()) throw ConfigError("potentials.constants." + it.key() + ": expected a number");
      c.constants[it.key()] = it->get<double>();
    }
  }
  c.V_source = get_or<std::string>(pot, "V", "1", "potentials");
  c.K_source = get_or<std::string>(pot, "K", "1", "potentials");
  c.pots.V = parse_checked(c.V_source, c.constants, "potentials.V");
  c.pots.K = parse_checked(c.K_source, c.constants, "potentials.K");
  c.pots.m = get_or<double>(pot, "m", 1.0, "potentials");
  c.pots.V0 = get_or<double>(pot, "V0", 1.0, "potentials");
  c.pots.K0 = pot.contains("K0") && !pot["K0"].is_null() ? pot["K0"].get<double>() : INFINITY;
  if (!(c.pots.m > 0.0)) throw ConfigError("potentials.m must be positive");
  if (!(c.pots.V0 > 0.0)) throw ConfigError("potentials.V0 must be positive");
  if (!(c.pots.m < c.pots.K0)) throw ConfigError("potentials.K0 must exceed m");
  if (pot.contains("M")) c.pots.M = concentration_set(pot["M"], "potentials.M");
  if (pot.contains("O")) {
    const json& o = pot["O"];
    reject_unknown(o, {"center", "radius"}, "potentials.O");
    if (o.contains("center")) c.pen.O.center = point3(o["center"], "potentials.O.center");
    c.pen.O.radius = get_or<double>(o, "radius", c.pen.O.radius, "potentials.O");
  }

  const json pen = j.value("penalization", json::object());
  reject_unknown(pen, {"tau", "beta", "t0"}, "penalization");
  c.pen.tau = get_or<double>(pen, "tau", 1.0, "penalization");
  c.pen.beta = get_or<double>(pen, "beta", 1.0, "penalization");
  c.pen.t0 = get_or<double>(pen, "t0", 0.0, "penalization");
  if (kind != RunKind::Shoot && kind != RunKind::Validate) c.pen.validate(c.pots);

  const json grid = j.value("grid", json::object());
  reject_unknown(grid, {"type", "nodes", "r_first", "extent_factor", "cells", "half_width"}, "grid");
  const std::string gt = get_or<std::string>(grid, "type", N == 2 ? "tensor" : "radial", "grid");
  if (gt == "radial") {
    c.grid.type = GridSpec::Type::Radial;
    if (N < 3) throw ConfigError("grid.type radial needs N >= 3");
  } else if (gt == "tensor") {
    c.grid.type = GridSpec::Type::Tensor;
    if (N != 2 && N != 3) throw ConfigError("grid.type tensor needs N = 2 or 3");
    if (kind == RunKind::Critical) throw ConfigError("the critical pipeline needs a radial grid");
  } else {
    throw ConfigError("grid.type: expected \"radial\" or \"tensor\"");
  }
  c.grid.nodes = get_or<std::size_t>(grid, "nodes", 6000, "grid");
  c.grid.r_first = get_or<double>(grid, "r_first", 1e-3, "grid");
  c.grid.extent_factor = get_or<double>(grid, "extent_factor", 1.05, "grid");
  c.grid.cells = get_or<std::size_t>(grid, "cells", 256, "grid");
  c.grid.half_width = get_or<double>(grid, "half_width", 2.0, "grid");
  if (c.grid.nodes < 10) throw ConfigError("grid.nodes must be at least 10");
  if (!(c.grid.r_first > 0.0)) throw ConfigError("grid.r_first must be positive");
  if (!(c.grid.extent_factor >= 1.0)) throw ConfigError("grid.extent_factor must be at least 1");
  if (c.grid.cells < 4 || c.grid.cells % 2 != 0) throw ConfigError("grid.cells must be even and at least 4");
  if (!(c.grid.half_width > 0.0)) throw ConfigError("grid.half_width must be positive");
  if (c.grid.type == GridSpec::Type::Radial) {
    const bool centered = c.pen.O.center == std::array<double, 3>{0, 0, 0} &&
                          c.pots.M.center == std::array<double, 3>{0, 0, 0} &&
                          c.pots.M.shape == ConcentrationSet::Shape::Point;
    if (kind != RunKind::Shoot && kind != RunKind::Validate && !centered)
      throw ConfigError("radial grids need O and M centered at the origin with M a point");
  }

  const json sol = j.value("solver", json::object());
  reject_unknown(sol, {"method", "max_iterations", "gradient_tolerance", "armijo", "min_step", "init_t",
                       "init_center", "warm_start", "x_samples"},
                 "solver");
  const std::string method = get_or<std::string>(sol, "method", "newton", "solver");
  if (method == "newton") c.solver.method = SolveMethod::Newton;
  else if (method == "descent") c.solver.method = SolveMethod::PreconditionedDescent;
  else throw ConfigError("solver.method: expected \"newton\" or \"descent\"");
  c.solver.max_iterations = get_or<int>(sol, "max_iterations", 100, "solver");
  c.solver.gradient_tolerance = get_or<double>(sol, "gradient_tolerance", 1e-8, "solver");
  c.solver.armijo = get_or<double>(sol, "armijo", 1e-4, "solver");
  c.solver.min_step = get_or<double>(sol, "min_step", 1e-10, "solver");
  c.solver.init_t = get_or<double>(sol, "init_t", 1.0, "solver");
  c.solver.x_samples = get_or<int>(sol, "x_samples", 32, "solver");
  c.warm_start = get_or<bool>(sol, "warm_start", true, "solver");
  if (sol.contains("init_center")) {
    Point y;
    y.x = point3(sol["init_center"], "solver.init_center");
    y.r = std::sqrt(y.x[0] * y.x[0] + y.x[1] * y.x[1] + y.x[2] * y.x[2]);
    if (c.pots.M.distance(y) > c.pen.beta)
      throw ConfigError("solver.init_center must lie within beta of the concentration set");
    c.solver.init_center = y;
  }
  if (!(c.solver.gradient_tolerance > 0.0)) throw ConfigError("solver.gradient_tolerance must be positive");
  if (c.solver.max_iterations < 1) throw ConfigError("solver.max_iterations must be at least 1");
  if (!(c.solver.armijo > 0.0 && c.solver.armijo < 0.5)) throw ConfigError("solver.armijo must lie in (0, 0.5)");
  if (!(c.solver.min_step > 0.0 && c.solver.min_step < 1.0)) throw ConfigError("solver.min_step must lie in (0, 1)");
  if (!(c.solver.init_t > 0.0)) throw ConfigError("solver.init_t must be positive");

  const json sh = j.value("shoot", json::object());
  reject_unknown(sh, {"zeta", "mass", "r_max", "tol_amplitude", "rtol", "scan_min", "scan_max",
                      "scan_per_decade", "profile_nodes", "preferred_amplitude"},
                 "shoot");
  c.shoot.N = N;
  c.shoot.p = c.model.p;
  c.shoot.m = c.pots.m;
  c.shoot.zeta = get_or<double>(sh, "zeta", kind == RunKind::Critical ? 0.0 : 1.0, "shoot");
  c.shoot.mass = get_or<double>(sh, "mass", 0.0, "shoot");
  c.shoot.r_max = get_or<double>(sh, "r_max", 1e3, "shoot");
  c.shoot.tol_amplitude = get_or<double>(sh, "tol_amplitude", 1e-13, "shoot");
  c.shoot.rtol = get_or<double>(sh, "rtol", 1e-12, "shoot");
  c.shoot.scan_min = get_or<double>(sh, "scan_min", 1e-4, "shoot");
  c.shoot.scan_max = get_or<double>(sh, "scan_max", 1e4, "shoot");
  c.shoot.scan_per_decade = get_or<int>(sh, "scan_per_decade", 4, "shoot");
  c.shoot.profile_nodes = get_or<std::size_t>(sh, "profile_nodes", 10001, "shoot");
  c.shoot.preferred_amplitude = get_or<double>(sh, "preferred_amplitude", 1.0, "shoot");
  if (kind == RunKind::Shoot) {
    try {
      c.shoot.validate();
    } catch (const std::exception& e) {
      throw ConfigError(std::string("shoot: ") + e.what());
    }
  }

  if (kind == RunKind::Solve || kind == RunKind::Sweep || kind == RunKind::Critical) {
    if (!j.contains("sweep")) throw ConfigError("sweep: missing (an hbar list is required)");
    c.hbar = hbar_list(j["sweep"]);
  }

  if (j.contains("variants")) {
    if (!j["variants"].is_array() || j["variants"].empty())
      throw ConfigError("variants: expected a non-empty array");
    for (const auto& v : j["variants"]) {
      reject_unknown(v, {"name", "V"}, "variants[]");
      Variant var{get_or<std::string>(v, "name", "", "variants[]"), get_or<std::string>(v, "V", "", "variants[]")};
      if (var.name.empty() || var.V.empty()) throw ConfigError("variants[]: name and V are required");
      parse_checked(var.V, c.constants, "variants." + var.name + ".V");
      c.variants.push_back(var);
    }
  }

  if (j.contains("control")) {
    const json& k = j["control"];
    reject_unknown(k, {"K", "parameter", "from", "to", "steps", "M"}, "control");
    ControlSpec ctl;
    ctl.K = get_or<std::string>(k, "K", "", "control");
    ctl.parameter = get_or<std::string>(k, "parameter", "", "control");
    ctl.from = get_or<double>(k, "from", 0.0, "control");
    ctl.to = get_or<double>(k, "to", 0.0, "control");
    ctl.steps = get_or<int>(k, "steps", 4, "control");
    if (ctl.K.empty() || ctl.parameter.empty()) throw ConfigError("control: K and parameter are required");
    if (ctl.steps < 1) throw ConfigError("control.steps must be at least 1");
    if (!k.contains("M")) throw ConfigError("control.M is required");
    ctl.M = concentration_set(k["M"], "control.M");
    Constants probe = c.constants;
    probe[ctl.parameter] = ctl.from;
    parse_checked(ctl.K, probe, "control.K");
    c.control = ctl;
  }

  const json out = j.value("outputs", json::object());
  reject_unknown(out, {"directory"}, "outputs");
  c.out_dir = get_or<std::string>(out, "directory", "out", "outputs");

  c.echo = j;
  c.echo["model"]["p"] = c.model.p;
  c.echo["model"]["N"] = N;
  c.echo["model"]["gamma"] = c.model.gamma;
  if (!c.hbar.empty()) c.echo["sweep"] = json{{"hbar", c.hbar}};
  return c;
}

RunConfig load_config_file(const std::string& path, RunKind kind) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    in >> j;
  } catch (const json::parse_error& e) {
    throw ConfigError("config is not valid JSON: " + std::string(e.what()));
  }
  return load_config(j, kind);
}

}  // namespace qls
