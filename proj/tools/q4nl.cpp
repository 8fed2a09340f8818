#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "q4nl/commands.hpp"
#include "q4nl/config.hpp"
#include "q4nl/error.hpp"

namespace {

struct Overrides {
  std::string config;
  std::optional<double> dt;
  std::optional<long> steps;
  std::optional<std::uint64_t> seed;
  std::optional<std::string> output;
};

void add_run_options(CLI::App* cmd, Overrides& o) {
  cmd->add_option("--config", o.config, "JSON run configuration")->required()->check(CLI::ExistingFile);
  cmd->add_option("--dt", o.dt, "time step");
  cmd->add_option("--steps", o.steps, "number of steps (sets t_end = steps * dt)");
  cmd->add_option("--seed", o.seed, "seed for random initial data");
  cmd->add_option("--output", o.output, "output directory");
}

q4nl::RunConfig load(const Overrides& o) {
  auto c = q4nl::load_config(o.config);
  if (o.dt) c.time.dt = *o.dt;
  if (o.steps) c.time.t_end = static_cast<double>(*o.steps) * c.time.dt;
  if (o.seed) c.initial.seed = *o.seed;
  if (o.output) c.output.directory = *o.output;
  q4nl::validate(c);
  return c;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Split-step simulator and diagnostics for coupled fourth-order Schroedinger systems"};
  app.require_subcommand(1);

  Overrides sim, ver, sca, wav;
  bool corrupt = false;
  auto* simulate = app.add_subcommand("simulate", "integrate and write series.csv and checkpoints");
  add_run_options(simulate, sim);
  auto* verify = app.add_subcommand("verify", "Morawetz identity residual under dt refinement");
  add_run_options(verify, ver);
  verify->add_flag("--corrupt-rhs-sign", corrupt, "flip the assembled right-hand side (negative control)");
  auto* scatter = app.add_subcommand("scatter", "scattering-state extraction at the configured checkpoints");
  add_run_options(scatter, sca);
  auto* waveop = app.add_subcommand("waveop", "wave operator and round-trip check");
  add_run_options(waveop, wav);

  q4nl::CheckArgs check_args;
  auto* check = app.add_subcommand("check", "exponent flags and admissibility (key=value)");
  check->add_option("--d,-n", check_args.d, "dimension")->required();
  check->add_option("--p", check_args.p, "nonlinearity exponent (decimal or a/b)");
  check->add_option("--N", check_args.components, "number of components");
  check->add_option("--q", check_args.q, "time exponent (a/b or inf)");
  check->add_option("--r", check_args.r, "space exponent (a/b or inf)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : q4nl::kExitUsage;
  }

  try {
    if (*simulate) return q4nl::cmd_simulate(load(sim), std::cout);
    if (*verify) return q4nl::cmd_verify(load(ver), std::cout, corrupt);
    if (*scatter) return q4nl::cmd_scatter(load(sca), std::cout);
    if (*waveop) return q4nl::cmd_waveop(load(wav), std::cout);
    if (*check) return q4nl::cmd_check(check_args, std::cout);
  } catch (const q4nl::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return q4nl::kExitUsage;
  } catch (const q4nl::BoundaryContamination& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return q4nl::kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return q4nl::kExitNumerical;
  }
  return q4nl::kExitUsage;
}
