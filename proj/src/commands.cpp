#include "qls/commands.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <memory>

#include "qls/closed_form.hpp"
#include "qls/csv.hpp"
#include "qls/errors.hpp"
#include "qls/output.hpp"

namespace qls {

using nlohmann::json;

namespace {

GridPtr grid_for(const RunConfig& cfg, double eps, double length_scale = 1.0) {
  if (cfg.grid.type == GridSpec::Type::Radial)
    return Grid::radial_geometric(cfg.model.N, cfg.grid.r_first * length_scale,
                                  cfg.grid.extent_factor * 2.0 * cfg.pen.beta / eps, cfg.grid.nodes);
  return Grid::tensor(cfg.model.N, cfg.grid.half_width / eps, cfg.grid.cells);
}

Problem problem_for(const RunConfig& cfg, const Potentials& pots, double hbar) {
  const RescaleMap map{hbar, cfg.model.gamma, cfg.model.p};
  Problem pb;
  pb.pots = pots;
  pb.pen = cfg.pen;
  pb.p = cfg.model.p;
  pb.kappa = map.kappa();
  pb.eps = map.eps();
  pb.transform = Transform(1.0);
  return pb;
}

Point with_radius(Point p) {
  p.r = std::sqrt(p.x[0] * p.x[0] + p.x[1] * p.x[1] + p.x[2] * p.x[2]);
  return p;
}

// Limit profile: the zero-mass ground state for N >= 3, the massive one in the plane.
struct Limit {
  RadialProfile profile;
  double C_m = 0.0;
};

Limit zero_mass_limit(const RunConfig& cfg) {
  ShootConfig sc = cfg.shoot;
  sc.N = cfg.model.N;
  sc.p = cfg.model.p;
  sc.m = cfg.pots.m;
  sc.zeta = 1.0;
  sc.mass = 0.0;
  const ShootResult gs = find_ground_state(sc);
  return {gs.profile, gs.energy.energy};
}

Limit planar_limit(const RunConfig& cfg, const Potentials& pots, double kappa, const Point& at) {
  ShootConfig sc = cfg.shoot;
  sc.N = 2;
  sc.p = cfg.model.p;
  sc.zeta = 1.0;
  sc.m = pots.K(at);
  sc.mass = kappa * pots.V(at);
  if (!(sc.m > 0.0 && sc.mass > 0.0)) throw DomainError("planar limit needs K > 0 and V > 0 at the peak");
  sc.r_max = 30.0 / std::sqrt(sc.mass);
  const ShootResult gs = find_ground_state(sc);
  return {gs.profile, gs.energy.energy};
}

void fill_point(SweepPoint& pt, const SolveOutcome& o, const EnergyModel& model, const Limit& limit,
                bool autonomous) {
  pt.converged = o.converged;
  pt.iterations = o.iterations;
  pt.message = o.message;
  pt.gamma = o.report.Gamma_eps;
  pt.gradient_norm = o.report.gradient_norm;
  pt.distance_to_X = o.distance_to_X;
  pt.positive = o.positive;
  pt.field = o.field;
  pt.trace = o.trace;
  pt.C_m = limit.C_m;
  pt.energy = o.report;
  if (!o.field.grid()) return;
  pt.sup_norm = norm_linf(o.field);
  SuiteContext ctx;
  ctx.model = &model;
  ctx.ground_sup = limit.profile.amplitude();
  ctx.C_m = limit.C_m;
  ctx.autonomous = autonomous;
  pt.suite = run_suite(o, ctx);
  if (o.converged) pt.report = concentration_report(o, model, limit.profile, limit.C_m);
}

bool is_autonomous(const Potentials& p) { return p.V.constant() && p.K.constant(); }

struct VariantRun {
  std::vector<std::unique_ptr<EnergyModel>> models;
  std::vector<SolveOutcome> outcomes;
};

std::vector<SweepPoint> run_variant(const RunConfig& cfg, const Potentials& pots, const std::string& name,
                                    int jobs, const Limit* zero_mass, VariantRun& run) {
  const int N = cfg.model.N;
  std::vector<const EnergyModel*> mp;
  std::vector<Limit> inits;
  for (double h : cfg.hbar) {
    const Problem pb = problem_for(cfg, pots, h);
    run.models.push_back(std::make_unique<EnergyModel>(grid_for(cfg, pb.eps), pb));
    mp.push_back(run.models.back().get());
    const Point y0 = cfg.solver.init_center ? *cfg.solver.init_center : pots.M.representative();
    inits.push_back(N == 2 ? planar_limit(cfg, pots, pb.kappa, y0) : *zero_mass);
  }
  std::vector<const RadialProfile*> grounds;
  for (const auto& l : inits) grounds.push_back(&l.profile);
  run.outcomes = continuation_sweep(cfg.solver, mp, grounds, cfg.warm_start, jobs);

  std::vector<SweepPoint> pts;
  for (std::size_t k = 0; k < cfg.hbar.size(); ++k) {
    const EnergyModel& model = *mp[k];
    SweepPoint pt;
    pt.variant = name;
    pt.hbar = cfg.hbar[k];
    pt.kappa = model.problem().kappa;
    pt.eps = model.problem().eps;
    const SolveOutcome& o = run.outcomes[k];
    Limit limit = inits[k];
    if (N == 2 && o.converged) {
      Point x = o.field.grid()->node(argmax_node(o.field));
      for (double& c : x.x) c *= pt.eps;
      limit = planar_limit(cfg, pots, pt.kappa, with_radius(x));
    }
    fill_point(pt, o, model, limit, is_autonomous(pots));
    pts.push_back(std::move(pt));
  }
  return pts;
}

std::vector<SweepPoint> run_control(const RunConfig& cfg, const Potentials& base, const VariantRun& first,
                                    const Limit* zero_mass) {
  const ControlSpec& ctl = *cfg.control;
  const int N = cfg.model.N;
  std::vector<SweepPoint> pts;
  auto moved = [&](double value) {
    Constants c = cfg.constants;
    c[ctl.parameter] = value;
    Potentials p = base;
    p.K = parse(ctl.K, c);
    p.M = ctl.M;
    return p;
  };
  const Potentials final_pots = moved(ctl.to);
  if (!first.outcomes.front().converged) throw SweepAborted("control needs a converged first point");

  // Homotopy in the K parameter at the largest hbar.
  GridField field = first.outcomes.front().field;
  SolveOutcome o;
  std::unique_ptr<EnergyModel> model;
  for (int s = 1; s <= ctl.steps; ++s) {
    const double value = ctl.from + (ctl.to - ctl.from) * s / ctl.steps;
    Problem pb = problem_for(cfg, moved(value), cfg.hbar.front());
    model = std::make_unique<EnergyModel>(field.grid(), pb);
    const Limit init = N == 2 ? planar_limit(cfg, pb.pots, pb.kappa, pb.pots.M.representative()) : *zero_mass;
    try {
      o = solve(cfg.solver, *model, init.profile, &field);
    } catch (const std::exception& e) {
      o = SolveOutcome{};
      o.message = e.what();
    }
    if (!o.converged) break;
    field = o.field;
  }

  for (std::size_t k = 0; k < cfg.hbar.size(); ++k) {
    if (k > 0) {
      Problem pb = problem_for(cfg, final_pots, cfg.hbar[k]);
      auto next = std::make_unique<EnergyModel>(grid_for(cfg, pb.eps), pb);
      const Limit init = N == 2 ? planar_limit(cfg, final_pots, pb.kappa, final_pots.M.representative()) : *zero_mass;
      if (o.converged) {
        const GridField start = warm_start_field(o.field, model->problem().eps, *next);
        try {
          o = solve(cfg.solver, *next, init.profile, &start);
        } catch (const std::exception& e) {
          o = SolveOutcome{};
          o.message = e.what();
        }
      }
      model = std::move(next);
    }
    SweepPoint pt;
    pt.variant = "control";
    pt.hbar = cfg.hbar[k];
    pt.kappa = model->problem().kappa;
    pt.eps = model->problem().eps;
    if (!o.converged) {
      pt.message = o.message.empty() ? "control continuation stopped" : o.message;
      pts.push_back(std::move(pt));
      continue;
    }
    Limit limit = zero_mass ? *zero_mass : Limit{};
    if (N == 2) {
      Point x = o.field.grid()->node(argmax_node(o.field));
      for (double& c : x.x) c *= pt.eps;
      limit = planar_limit(cfg, final_pots, pt.kappa, with_radius(x));
    }
    fill_point(pt, o, *model, limit, is_autonomous(final_pots));
    pts.push_back(std::move(pt));
  }
  return pts;
}

void check_V(const RunConfig& cfg, const Potentials& pots, const std::string& name) {
  SamplingPlan plan;
  plan.dimension = pots.V.radial_only() && pots.K.radial_only() ? 1 : std::min(cfg.model.N, 3);
  plan.K0 = cfg.pots.K0;
  const AssumptionReport rep = validate_assumptions(pots.V, pots.K, cfg.pen.O, plan);
  for (const auto& v : rep.violations)
    if (v.assumption == "V")
      throw ConfigError("variant " + name + " violates the assumption on V: " + v.message +
                        " (value " + format_double(v.value) + ")");
}

}  // namespace

bool SweepResult::all_converged() const {
  return std::all_of(points.begin(), points.end(), [](const SweepPoint& p) { return p.converged; });
}

bool SweepResult::all_checks_passed() const {
  return std::all_of(points.begin(), points.end(), [](const SweepPoint& p) { return p.suite.passed(); });
}

std::vector<const SweepPoint*> SweepResult::of(const std::string& variant) const {
  std::vector<const SweepPoint*> out;
  for (const auto& p : points)
    if (p.variant == variant) out.push_back(&p);
  return out;
}

SweepResult run_sweep(const RunConfig& cfg, int jobs) {
  if (cfg.hbar.empty()) throw ConfigError("sweep: the hbar list is empty");
  SweepResult res;
  std::vector<Variant> variants = cfg.variants;
  if (variants.empty()) variants.push_back({"base", cfg.V_source});
  std::optional<Limit> zero_mass;
  if (cfg.model.N >= 3) zero_mass = zero_mass_limit(cfg);
  if (cfg.grid.type == GridSpec::Type::Tensor)
    res.cell = 2.0 * cfg.grid.half_width / static_cast<double>(cfg.grid.cells);
  if (zero_mass) res.ground_sup = zero_mass->profile.amplitude();

  VariantRun first;
  Potentials first_pots;
  for (std::size_t i = 0; i < variants.size(); ++i) {
    const Potentials pots = cfg.with_V(variants[i].V);
    check_V(cfg, pots, variants[i].name);
    VariantRun run;
    auto pts = run_variant(cfg, pots, variants[i].name, jobs, zero_mass ? &*zero_mass : nullptr, run);
    res.variants.push_back(variants[i].name);
    for (auto& p : pts) res.points.push_back(std::move(p));
    if (i == 0) {
      first = std::move(run);
      first_pots = pots;
    }
  }
  if (cfg.control) {
    auto pts = run_control(cfg, first_pots, first, zero_mass ? &*zero_mass : nullptr);
    res.variants.push_back("control");
    for (auto& p : pts) res.points.push_back(std::move(p));
  }
  return res;
}

std::vector<CriticalPoint> run_critical_sweep(const RunConfig& cfg, int jobs) {
  const int N = cfg.model.N;
  const double m = cfg.pots.m;
  const double V0 = cfg.pots.V(cfg.pots.M.representative());
  std::vector<CriticalPoint> out(cfg.hbar.size());
  auto run_one = [&](std::size_t k) {
    CriticalPoint cp;
    cp.hbar = cfg.hbar[k];
    const CriticalRescaleMap map{cp.hbar, cfg.model.gamma, cfg.model.alpha, N};
    cp.params = critical_params(map);
    cp.mu_pred = critical_mu_prediction(N, m, cp.params.lambda, V0, cp.params.zeta);
    const RadialProfile bubble = talenti_profile(N, m, cp.mu_pred);
    Problem pb;
    pb.pots = cfg.pots;
    pb.pen = cfg.pen;
    pb.p = map.p();
    pb.kappa = cp.params.lambda;
    pb.eps = cp.params.eps;
    pb.transform = Transform(cp.params.zeta);
    const EnergyModel model(grid_for(cfg, pb.eps, 1.0 / cp.mu_pred), pb);
    SolveOutcome o;
    try {
      o = solve(cfg.solver, model, bubble);
    } catch (const std::exception& e) {
      o.message = e.what();
    }
    cp.converged = o.converged;
    cp.iterations = o.iterations;
    cp.message = o.message;
    cp.gamma = o.report.Gamma_eps;
    cp.pohozaev_residual = o.report.pohozaev_residual;
    cp.field = o.field;
    if (o.converged) {
      cp.fit = critical_profile_fit(o.field, m);
      SuiteContext ctx;
      ctx.model = &model;
      ctx.ground_sup = bubble.amplitude();
      ctx.C_m = profile_energy(talenti_profile(N, m, 1.0), Transform(0.0), pb.p, m).energy;
      ctx.autonomous = is_autonomous(cfg.pots);
      ctx.critical = true;
      cp.suite = run_suite(o, ctx);
    }
    return cp;
  };
  (void)jobs;
  for (std::size_t k = 0; k < out.size(); ++k) out[k] = run_one(k);
  return out;
}

// ---------------------------------------------------------------------------
// Commands

namespace {

std::string out_dir_of(const RunConfig& cfg, const CliOptions& opt) {
  return opt.out_dir.empty() ? cfg.out_dir : opt.out_dir;
}

json energy_json(const EnergyReport& r) {
  return {{"L_m", r.L_m},
          {"P_eps", r.P_eps},
          {"Q_eps", r.Q_eps},
          {"Gamma_eps", r.Gamma_eps},
          {"pohozaev_residual", r.pohozaev_residual},
          {"gradient_norm", r.gradient_norm},
          {"dirichlet", r.dirichlet},
          {"penalty_integral", r.penalty_integral}};
}

json suite_json(const SuiteResult& s) {
  json a = json::array();
  for (const auto& c : s.checks)
    a.push_back({{"name", c.name},
                 {"property", c.property},
                 {"status", to_string(c.status)},
                 {"value", c.value},
                 {"tolerance", c.tolerance},
                 {"reason", c.reason}});
  return a;
}

json point_json(const Point& p) { return json::array({p.x[0], p.x[1], p.x[2]}); }

json report_json(const ConcentrationReport& r) {
  return {{"x_hbar", point_json(r.x_hbar)},
          {"dist_to_M", r.dist_to_M},
          {"profile_error_d12", r.profile_error_d12},
          {"profile_error_rel", r.profile_error_rel},
          {"tail_xi", r.tail_xi},
          {"tail_xi_fit", r.tail_xi_fit},
          {"tail_rate_admissible", r.tail_rate_admissible},
          {"tail_dominated", r.tail_dominated},
          {"energy_gap", r.energy_gap},
          {"penalty_integral", r.penalty_integral},
          {"Q_active", r.Q_active}};
}

void write_trace(const std::string& path, const std::vector<TraceRow>& trace) {
  CsvWriter csv(path, {"iteration", "gamma", "gradient_norm", "step"});
  for (const auto& t : trace) csv.mixed_row({static_cast<long long>(t.iteration), t.gamma, t.gradient_norm, t.step});
}

void log(const CliOptions& opt, const std::string& s) {
  if (opt.verbose) std::fprintf(stderr, "%s\n", s.c_str());
}

const std::vector<std::string> kSweepHeader{
    "variant", "hbar", "kappa", "eps", "converged", "iterations", "x_hbar", "x_hbar_x1", "x_hbar_x2",
    "x_hbar_x3", "dist_to_M", "profile_error_d12", "profile_error_rel", "tail_xi", "tail_xi_fit",
    "tail_dominated", "energy_gap", "gamma", "gradient_norm", "penalty_integral", "Q_active",
    "checks_passed"};

void write_sweep_csv(const std::string& path, const SweepResult& res) {
  CsvWriter csv(path, kSweepHeader);
  for (const auto& p : res.points) {
    const auto& r = p.report;
    csv.mixed_row({p.variant, p.hbar, p.kappa, p.eps, static_cast<long long>(p.converged),
                   static_cast<long long>(p.iterations), r.x_hbar.r, r.x_hbar.x[0], r.x_hbar.x[1],
                   r.x_hbar.x[2], r.dist_to_M, r.profile_error_d12, r.profile_error_rel, r.tail_xi,
                   r.tail_xi_fit, static_cast<long long>(r.tail_dominated), r.energy_gap, p.gamma,
                   p.gradient_norm, r.penalty_integral, static_cast<long long>(r.Q_active),
                   static_cast<long long>(p.suite.passed())});
  }
}

}  // namespace

int cmd_shoot(const RunConfig& cfg, const CliOptions& opt) {
  RunManifest man(out_dir_of(cfg, opt), "shoot", cfg.echo);
  man.begin_stage("shoot");
  int code = 0;
  try {
    const ShootResult gs = find_ground_state(cfg.shoot);
    gs.profile.write_csv(man.file("ground_state.csv"));
    {
      CsvWriter csv(man.file("shoot_trace.csv"), {"amplitude", "outcome"});
      for (const auto& [a, o] : gs.trace) csv.mixed_row({a, std::string(to_string(o))});
    }
    const auto& e = gs.energy;
    write_json(man.file("shoot.json"),
               {{"amplitude", gs.amplitude},
                {"decay_c", gs.decay_c},
                {"decay_c_flux", gs.decay_c_flux},
                {"plateau_variation", gs.plateau_variation},
                {"scale_invariant", gs.scale_invariant},
                {"energy",
                 {{"dirichlet", e.integrals.dirichlet},
                  {"source", e.integrals.source},
                  {"mass", e.integrals.mass},
                  {"L_m", e.energy},
                  {"pohozaev_residual", e.pohozaev_residual}}}});
    log(opt, "amplitude " + format_double(gs.amplitude));
  } catch (const BracketError& e) {
    write_json(man.file("shoot.json"),
               {{"error", e.what()}, {"scanned_min", e.scanned_min()}, {"scanned_max", e.scanned_max()}});
    std::fprintf(stderr, "shoot: %s (scanned [%s, %s])\n", e.what(), format_double(e.scanned_min()).c_str(),
                 format_double(e.scanned_max()).c_str());
    code = 2;
  } catch (const std::exception& e) {
    write_json(man.file("shoot.json"), {{"error", e.what()}});
    std::fprintf(stderr, "shoot: %s\n", e.what());
    code = 2;
  }
  man.finalize(code);
  return code;
}

int cmd_validate(const RunConfig& cfg, const CliOptions& opt) {
  RunManifest man(out_dir_of(cfg, opt), "validate", cfg.echo);
  SamplingPlan plan;
  plan.dimension = cfg.pots.V.radial_only() && cfg.pots.K.radial_only() ? 1 : std::min(std::max(cfg.model.N, 2), 3);
  plan.K0 = cfg.pots.K0;
  const AssumptionReport rep = validate_assumptions(cfg.pots.V, cfg.pots.K, cfg.pen.O, plan);
  json v = json::array();
  for (const auto& x : rep.violations)
    v.push_back({{"assumption", x.assumption}, {"message", x.message}, {"witness", point_json(x.witness)}, {"value", x.value}});
  json mx = json::array();
  for (const auto& p : rep.maximizers) mx.push_back(point_json(p));
  write_json(man.file("assumptions.json"), {{"passed", rep.passed},
                                            {"V0", rep.V0},
                                            {"V_sup", rep.V_sup},
                                            {"m", rep.m},
                                            {"K_boundary", rep.K_boundary},
                                            {"K_sup", rep.K_sup},
                                            {"maximizer_radius", rep.maximizer_radius},
                                            {"maximizers", mx},
                                            {"violations", v}});
  for (const auto& x : rep.violations) std::fprintf(stderr, "%s: %s\n", x.assumption.c_str(), x.message.c_str());
  const int code = rep.passed ? 0 : 1;
  man.finalize(code);
  return code;
}

int cmd_solve(const RunConfig& cfg, const CliOptions& opt) {
  RunConfig one = cfg;
  one.hbar = {cfg.hbar.front()};
  one.variants.clear();
  one.control.reset();
  RunManifest man(out_dir_of(cfg, opt), "solve", cfg.echo);
  man.begin_stage("solve");
  int code = 0;
  try {
    const SweepResult res = run_sweep(one, opt.jobs);
    const SweepPoint& p = res.points.front();
    write_field_csv(p.field, man.file("field.csv"), "v");
    write_trace(man.file("trace.csv"), p.trace);
    json j = {{"hbar", p.hbar}, {"kappa", p.kappa}, {"eps", p.eps}, {"converged", p.converged},
              {"iterations", p.iterations}, {"message", p.message}, {"distance_to_X", p.distance_to_X},
              {"positive", p.positive}, {"C_m", p.C_m}, {"energy", energy_json(p.energy)},
              {"diagnostics", suite_json(p.suite)}};
    if (p.converged) j["concentration"] = report_json(p.report);
    write_json(man.file("report.json"), j);
    code = p.converged && p.suite.passed() ? 0 : 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "solve: %s\n", e.what());
    code = 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "solve: %s\n", e.what());
    code = 2;
  }
  man.finalize(code);
  return code;
}

int cmd_sweep(const RunConfig& cfg, const CliOptions& opt) {
  RunManifest man(out_dir_of(cfg, opt), "sweep", cfg.echo);
  man.begin_stage("sweep");
  int code = 0;
  try {
    const SweepResult res = run_sweep(cfg, opt.jobs);
    man.begin_stage("write");
    write_sweep_csv(man.file("sweep.csv"), res);

    json diag = json::array();
    json trends = json::object();
    for (const auto& name : res.variants) {
      std::vector<double> gaps, dists;
      for (const SweepPoint* p : res.of(name)) {
        diag.push_back({{"variant", name}, {"hbar", p->hbar}, {"checks", suite_json(p->suite)}});
        if (p->converged) {
          gaps.push_back(p->report.energy_gap);
          dists.push_back(p->report.dist_to_M);
        }
      }
      const TrendCheck t = majority_trend(gaps);
      trends[name] = {{"energy_gap_decreasing_majority", t.passed}, {"agreeing_pairs", t.agreeing},
                      {"pairs", t.pairs}};
    }
    write_json(man.file("diagnostics.json"), diag);
    man.set("trends", trends);

    // Comparison table at the smallest hbar.
    {
      CsvWriter csv(man.file("variants.csv"),
                    {"variant", "hbar", "x_hbar_x1", "x_hbar_x2", "x_hbar_x3", "dist_to_M", "profile_error_d12",
                     "max_pairwise_distance", "max_pairwise_cells"});
      std::vector<const SweepPoint*> last;
      for (const auto& name : res.variants) {
        const auto pts = res.of(name);
        if (name != "control" && !pts.empty()) last.push_back(pts.back());
      }
      double spread = 0.0;
      for (const auto* a : last)
        for (const auto* b : last) spread = std::max(spread, distance(a->report.x_hbar, b->report.x_hbar));
      for (const auto& name : res.variants) {
        const auto pts = res.of(name);
        if (pts.empty()) continue;
        const SweepPoint& p = *pts.back();
        csv.mixed_row({name, p.hbar, p.report.x_hbar.x[0], p.report.x_hbar.x[1], p.report.x_hbar.x[2],
                       p.report.dist_to_M, p.report.profile_error_d12, spread,
                       res.cell > 0.0 ? spread / res.cell : 0.0});
      }
    }
    for (const auto& name : res.variants) {
      const auto pts = res.of(name);
      if (!pts.empty() && pts.back()->converged)
        write_field_csv(pts.back()->field, man.file("field_" + name + ".csv"), "v");
    }
    write_gnuplot(man.file("energy_gap.gp"),
                  {"energy gap against eps", "sweep.csv", "eps", {"energy_gap"}, true, true, "variant", res.variants},
                  kSweepHeader);
    write_gnuplot(man.file("dist_to_M.gp"),
                  {"distance of the maximum to M", "sweep.csv", "hbar", {"dist_to_M"}, true, false, "variant",
                   res.variants},
                  kSweepHeader);
    write_gnuplot(man.file("profile_error.gp"),
                  {"profile error against hbar", "sweep.csv", "hbar", {"profile_error_d12"}, true, true, "variant",
                   res.variants},
                  kSweepHeader);
    code = res.all_converged() && res.all_checks_passed() ? 0 : 2;
    for (const auto& p : res.points)
      log(opt, p.variant + " hbar=" + format_double(p.hbar) + " " + (p.converged ? "converged" : p.message));
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "sweep: %s\n", e.what());
    code = 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "sweep: %s\n", e.what());
    code = 2;
  }
  man.finalize(code);
  return code;
}

int cmd_critical_sweep(const RunConfig& cfg, const CliOptions& opt) {
  RunManifest man(out_dir_of(cfg, opt), "critical-sweep", cfg.echo);
  man.begin_stage("critical-sweep");
  int code = 0;
  try {
    const auto pts = run_critical_sweep(cfg, opt.jobs);
    const std::vector<std::string> header{"hbar", "lambda", "zeta", "eps", "mu_pred", "mu_peak", "mu_half_width",
                                          "linf_rel_error", "gamma", "pohozaev_residual", "converged",
                                          "checks_passed"};
    {
      CsvWriter csv(man.file("critical.csv"), header);
      for (const auto& p : pts)
        csv.mixed_row({p.hbar, p.params.lambda, p.params.zeta, p.params.eps, p.mu_pred, p.fit.mu,
                       p.fit.mu_half_width, p.fit.linf_rel_error, p.gamma, p.pohozaev_residual,
                       static_cast<long long>(p.converged), static_cast<long long>(p.suite.passed())});
    }
    std::vector<double> errs;
    bool ok = true;
    json diag = json::array();
    for (const auto& p : pts) {
      ok = ok && p.converged && p.suite.passed();
      if (p.converged) errs.push_back(p.fit.linf_rel_error);
      diag.push_back({{"hbar", p.hbar}, {"checks", suite_json(p.suite)}});
    }
    write_json(man.file("diagnostics.json"), diag);
    const TrendCheck t = majority_trend(errs);
    man.set("trends", {{"fit_error_decreasing_majority", t.passed}, {"agreeing_pairs", t.agreeing}, {"pairs", t.pairs}});
    if (!pts.empty() && pts.back().converged) write_field_csv(pts.back().field, man.file("field_critical.csv"), "v");
    write_gnuplot(man.file("critical_fit.gp"),
                  {"bubble fit error against hbar", "critical.csv", "hbar", {"linf_rel_error"}, true, true, "", {}},
                  header);
    code = ok ? 0 : 2;
  } catch (const ConfigError& e) {
    std::fprintf(stderr, "critical-sweep: %s\n", e.what());
    code = 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "critical-sweep: %s\n", e.what());
    code = 2;
  }
  man.finalize(code);
  return code;
}

}  // namespace qls
