#include "q4nl/commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <ostream>

#include "q4nl/error.hpp"
#include "q4nl/functionals.hpp"
#include "q4nl/initial.hpp"
#include "q4nl/io.hpp"
#include "q4nl/morawetz.hpp"
#include "q4nl/propagator.hpp"
#include "q4nl/scattering.hpp"

namespace fs = std::filesystem;

namespace q4nl {

namespace {

fs::path prepare_directory(const RunConfig& config) {
  const fs::path dir(config.output.directory);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir))
    throw ConfigError("cannot create output directory '" + dir.string() + "'", "output.directory");
  const auto probe = dir / ".q4nl_write_test";
  {
    std::ofstream out(probe);
    if (!out) throw ConfigError("output directory '" + dir.string() + "' is not writable", "output.directory");
  }
  fs::remove(probe, ec);
  return dir;
}

std::ofstream open_out(const fs::path& path, std::ios::openmode mode = std::ios::out) {
  std::ofstream out(path, mode | std::ios::trunc);
  if (!out) throw ConfigError("cannot write '" + path.string() + "'", "output.directory");
  return out;
}

FieldState initial_state(const RunConfig& c, const Grid& grid) {
  return make_initial(c.initial.kind, c.initial.params, grid, c.system, c.initial.seed);
}

Checkpoint snapshot(const RunConfig& c, const FieldState& s) { return {c.grid, c.system.kappa, c.system.p, s}; }

std::string join(const std::vector<double>& xs) {
  std::string out;
  for (std::size_t i = 0; i < xs.size(); ++i) out += (i ? "," : "") + format_value(xs[i]);
  return out;
}

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

}  // namespace

int cmd_simulate(const RunConfig& config, std::ostream& log) {
  validate(config);
  const Grid grid(config.grid);
  const auto dir = prepare_directory(config);
  open_out(dir / "config.json") << serialize_config(config);

  const auto plan = config.plan();
  std::map<long, int> checkpoint_steps;
  for (std::size_t k = 0; k < config.scattering.checkpoint_times.size(); ++k) {
    const double t = config.scattering.checkpoint_times[k];
    if (t > config.time.t_end + 1e-12) {
      log << "warning: checkpoint time " << t << " lies beyond t_end and is skipped\n";
      continue;
    }
    checkpoint_steps[std::lround(t / config.time.dt)] = static_cast<int>(k);
  }

  std::ofstream csv_file;
  std::ostream* csv = nullptr;
  if (config.output.has("csv")) {
    csv_file = open_out(dir / "series.csv");
    csv = &csv_file;
  }
  const auto state0 = initial_state(config, grid);
  std::optional<SeriesWriter> writer;
  if (csv) {
    writer.emplace(*csv, grid, config.system, config.diagnostics.q_list, config.weight(grid),
                   config.diagnostics.interaction);
    writer->write_header();
  }

  bool warned = false;
  StepPlan every = plan;
  every.record_every = 1;
  try {
    integrate(state0, grid, config.system, every, [&](const FieldState& s, long step) {
      if (writer && step % plan.record_every == 0) writer->write_row(s);
      if (auto it = checkpoint_steps.find(step); it != checkpoint_steps.end() && config.output.has("checkpoint"))
        write_checkpoint((dir / ("checkpoint_" + std::to_string(it->second) + ".q4nl")).string(), snapshot(config, s));
      if (!warned && step % plan.record_every == 0 && boundary_fraction(s, grid) > kBoundaryThreshold) {
        log << "warning: boundary fraction exceeds " << kBoundaryThreshold << " at t = " << s.t << "\n";
        warned = true;
      }
    });
  } catch (const BlowUpError& e) {
    if (csv) csv->flush();
    log << "error: " << e.what() << "\n";
    return kExitNumerical;
  }
  if (csv) csv->flush();
  log << "rows=" << (writer ? writer->rows() : 0) << "\n";
  log << "steps=" << plan.steps << "\n";
  return kExitPass;
}

std::vector<VerifyLevel> run_verification(const RunConfig& config, bool corrupt_rhs_sign, std::ostream* residual_csv) {
  validate(config);
  const Grid grid(config.grid);
  const auto w = weight_derivatives(config.weight(grid), grid);
  const auto state0 = initial_state(config, grid);
  const double sign = corrupt_rhs_sign ? -1.0 : 1.0;
  if (residual_csv) *residual_csv << "dt,t,action,rhs_0,rhs_1,rhs_2,rhs_3,fd_derivative,residual\n";

  std::vector<VerifyLevel> levels;
  for (int level = 0; level < 3; ++level) {
    const double dt = config.time.dt / std::pow(2.0, level);
    std::vector<double> t, action;
    std::vector<std::array<double, 4>> rhs;
    integrate(state0, grid, config.system, StepPlan::over(config.time.t_end, dt), [&](const FieldState& s, long) {
      t.push_back(s.t);
      action.push_back(action_M(s, grid, w));
      auto r = morawetz_rhs(s, grid, config.system, w);
      for (auto& v : r) v *= sign;
      rhs.push_back(r);
    });
    VerifyLevel lv;
    lv.dt = dt;
    for (std::size_t i = 1; i + 1 < t.size(); ++i) {
      const double fd = (action[i + 1] - action[i - 1]) / (t[i + 1] - t[i - 1]);
      const double total = rhs[i][0] + rhs[i][1] + rhs[i][2] + rhs[i][3];
      const double res = fd - total;
      lv.max_residual = std::max(lv.max_residual, std::abs(res));
      lv.max_rhs = std::max(lv.max_rhs, std::abs(total));
      if (residual_csv) {
        *residual_csv << format_value(dt) << ',' << format_value(t[i]) << ',' << format_value(action[i]);
        for (double v : rhs[i]) *residual_csv << ',' << format_value(v);
        *residual_csv << ',' << format_value(fd) << ',' << format_value(res) << '\n';
      }
    }
    if (t.size() < 3) throw ConfigError("verify needs at least two steps", "time.t_end");
    lv.relative = lv.max_rhs > 0.0 ? lv.max_residual / lv.max_rhs : (lv.max_residual > 0.0 ? INFINITY : 0.0);
    levels.push_back(lv);
  }
  return levels;
}

int cmd_verify(const RunConfig& config, std::ostream& log, bool corrupt_rhs_sign) {
  validate(config);
  const auto dir = prepare_directory(config);
  auto csv = open_out(dir / "verify.csv");
  const auto levels = run_verification(config, corrupt_rhs_sign, &csv);
  for (std::size_t i = 0; i < levels.size(); ++i) {
    const auto& lv = levels[i];
    log << "dt=" << format_value(lv.dt) << " max_residual=" << format_value(lv.max_residual)
        << " relative_residual=" << format_value(lv.relative);
    if (i > 0 && lv.max_residual > 0.0 && levels[i - 1].max_residual > 0.0)
      log << " order=" << format_value(std::log2(levels[i - 1].max_residual / lv.max_residual));
    log << "\n";
  }
  const bool ok = levels.back().relative < config.diagnostics.tolerance;
  log << "tolerance=" << format_value(config.diagnostics.tolerance) << "\nresult=" << verdict(ok) << "\n";
  return ok ? kExitPass : kExitThreshold;
}

int cmd_scatter(const RunConfig& config, std::ostream& log) {
  validate(config);
  const Grid grid(config.grid);
  const auto dir = prepare_directory(config);
  const auto state0 = initial_state(config, grid);
  const auto check = check_exponents(grid.dim(), config.system.p, config.system.components);
  const auto rep = extract_scattering_state(
      evolve_checkpoints(state0, grid, config.system, config.scattering.checkpoint_times, config.time.dt), grid,
      config.system);
  for (const auto& w : rep.warnings) log << "warning: " << w << "\n";

  auto csv = open_out(dir / "scatter.csv");
  csv << "t,cauchy_previous,scattering_error,h2_pullback\n";
  for (std::size_t i = 0; i < rep.times.size(); ++i) {
    csv << format_value(rep.times[i]) << ',' << (i ? format_value(rep.consecutive[i - 1]) : "") << ','
        << format_value(rep.scattering_error[i]) << ',' << format_value(h2_norm_total(rep.pullbacks[i], grid)) << '\n';
  }
  if (config.output.has("checkpoint"))
    write_checkpoint((dir / "asymptotic_state.q4nl").string(), snapshot(config, rep.asymptotic_state));

  log << "times=" << join(rep.times) << "\n";
  log << "cauchy_consecutive=" << join(rep.consecutive) << "\n";
  log << "max_cauchy=" << format_value(rep.max_cauchy()) << "\n";
  log << "scattering_ok=" << (check.scattering_ok ? "true" : "false") << "\n";
  log << "in_theorem_range=" << (rep.in_theorem_range ? "true" : "false") << "\n";
  log << "norm=H2 (l2 over components)\n";
  log << "result=" << verdict(rep.success) << "\n";
  return rep.success ? kExitPass : kExitThreshold;
}

int cmd_waveop(const RunConfig& config, std::ostream& log) {
  validate(config);
  const double T = config.scattering.horizon;
  if (!(T > 0.0)) throw ConfigError("wave operator needs a positive horizon", "scattering.horizon");
  const Grid grid(config.grid);
  const auto dir = prepare_directory(config);
  const auto u0plus = initial_state(config, grid);
  auto times = config.scattering.checkpoint_times;
  if (times.empty()) times = {T, 2 * T, 4 * T};
  const auto rep = wave_operator_round_trip(u0plus, T, grid, config.system, config.time.dt, times);
  for (const auto& w : rep.reextracted.warnings) log << "warning: " << w << "\n";
  if (config.output.has("checkpoint"))
    write_checkpoint((dir / "wave_operator_initial.q4nl").string(), snapshot(config, rep.initial));
  const bool ok = rep.discrepancy < config.scattering.tolerance;
  log << "horizon=" << format_value(T) << "\n";
  log << "checkpoint_times=" << join(times) << "\n";
  log << "initial_shift=" << format_value(h2_distance(rep.initial, u0plus, grid)) << "\n";
  log << "round_trip_error=" << format_value(rep.discrepancy) << "\n";
  log << "relative_round_trip_error=" << format_value(rep.relative_discrepancy) << "\n";
  log << "tolerance=" << format_value(config.scattering.tolerance) << "\n";
  log << "result=" << verdict(ok) << "\n";
  return ok ? kExitPass : kExitThreshold;
}

int cmd_check(const CheckArgs& args, std::ostream& out) {
  const auto pe = parse_exponent(args.p);
  if (pe.infinite) throw ConfigError("p must be finite", "p");
  const auto c = check_exponents(args.d, pe.value, args.components);
  auto flag = [](bool b) { return b ? "true" : "false"; };
  out << "d=" << args.d << "\n";
  out << "p=" << Exponent::of(c.p).str() << "\n";
  out << "N=" << args.components << "\n";
  out << "p_star=" << (c.p_star ? Exponent::of(*c.p_star).str() : "inf") << "\n";
  out << "decay_ok=" << flag(c.decay_ok) << "\n";
  out << "scattering_ok=" << flag(c.scattering_ok) << "\n";
  out << "in_theorem_range=" << flag(c.in_theorem_range) << "\n";
  if (args.q && args.r) {
    const auto q = parse_exponent(*args.q);
    const auto r = parse_exponent(*args.r);
    out << "q=" << q.str() << "\nr=" << r.str() << "\n";
    out << "admissible=" << flag(admissible_pair(q, r, args.d)) << "\n";
  } else if (c.p > 0) {
    const auto [q, r] = pair_from_p(c.p, args.d);
    out << "q=" << q.str() << "\nr=" << r.str() << "\n";
    out << "admissible=" << flag(admissible_pair(q, r, args.d)) << "\n";
  }
  return kExitPass;
}

}  // namespace q4nl
