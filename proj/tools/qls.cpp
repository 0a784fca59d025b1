// Command-line driver: shoot, solve, sweep, validate, critical-sweep.

#include <cstdio>
#include <exception>
#include <string>

#include <CLI11.hpp>

#include "qls/commands.hpp"
#include "qls/errors.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Quasilinear Schrodinger ground states and semiclassical concentration"};
  app.require_subcommand(1);

  std::string config;
  qls::CliOptions opt;
  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--config", config, "JSON run configuration")->required()->check(CLI::ExistingFile);
    sub->add_option("--out-dir", opt.out_dir, "output directory (overrides outputs.directory)");
    sub->add_option("--jobs", opt.jobs, "worker threads for independent solves")->check(CLI::PositiveNumber);
    sub->add_flag("--verbose", opt.verbose, "progress on stderr");
  };
  auto* shoot = app.add_subcommand("shoot", "radial ground state of the limit equation");
  auto* solve = app.add_subcommand("solve", "one penalized solve at the first hbar of the sweep");
  auto* sweep = app.add_subcommand("sweep", "hbar sweep over V variants with concentration reports");
  auto* validate = app.add_subcommand("validate", "check V and K against the standing assumptions");
  auto* critical = app.add_subcommand("critical-sweep", "critical-exponent hbar sweep with bubble fits");
  for (auto* s : {shoot, solve, sweep, validate, critical}) add_common(s);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 1;
  }

  try {
    if (shoot->parsed()) return qls::cmd_shoot(qls::load_config_file(config, qls::RunKind::Shoot), opt);
    if (solve->parsed()) return qls::cmd_solve(qls::load_config_file(config, qls::RunKind::Solve), opt);
    if (sweep->parsed()) return qls::cmd_sweep(qls::load_config_file(config, qls::RunKind::Sweep), opt);
    if (validate->parsed()) return qls::cmd_validate(qls::load_config_file(config, qls::RunKind::Validate), opt);
    if (critical->parsed())
      return qls::cmd_critical_sweep(qls::load_config_file(config, qls::RunKind::Critical), opt);
  } catch (const qls::ConfigError& e) {
    std::fprintf(stderr, "config error: %s\n", e.what());
    return 1;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
