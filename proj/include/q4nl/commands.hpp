#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "q4nl/config.hpp"

namespace q4nl {

enum ExitCode : int { kExitPass = 0, kExitUsage = 1, kExitNumerical = 2, kExitThreshold = 3 };

/// Writes series.csv, config.json and checkpoint_<k>.q4nl (one per configured
/// checkpoint time within [0, t_end]) into output.directory. Rows are emitted
/// at every record_every-th step, t = 0 included.
int cmd_simulate(const RunConfig& config, std::ostream& log);

struct VerifyLevel {
  double dt = 0.0;
  double max_residual = 0.0;
  double max_rhs = 0.0;
  double relative = 0.0;  // max_residual / max_rhs, 0 when both vanish
};

/// Morawetz identity at dt, dt/2, dt/4 over [0, t_end]. corrupt_rhs_sign flips
/// the assembled right-hand side (negative control).
std::vector<VerifyLevel> run_verification(const RunConfig& config, bool corrupt_rhs_sign, std::ostream* residual_csv);

/// Exit 0 iff the relative residual at the finest dt is below diagnostics.tolerance.
int cmd_verify(const RunConfig& config, std::ostream& log, bool corrupt_rhs_sign = false);

/// Checkpoints at scattering.checkpoint_times, pullback and Cauchy report.
/// Exit 0 iff the extraction succeeds.
int cmd_scatter(const RunConfig& config, std::ostream& log);

/// The configured initial data is taken as the asymptotic state; wave operator
/// from scattering.horizon and re-extraction at scattering.checkpoint_times
/// (default T, 2T, 4T). Exit 0 iff the round trip is within scattering.tolerance.
int cmd_waveop(const RunConfig& config, std::ostream& log);

struct CheckArgs {
  int d = 3;
  std::string p = "1";
  int components = 1;
  std::optional<std::string> q;
  std::optional<std::string> r;
};

/// key=value report of the exponent flags and of pair admissibility: the given
/// (q, r) if both are set, else the pair built from p.
int cmd_check(const CheckArgs& args, std::ostream& out);

}  // namespace q4nl
