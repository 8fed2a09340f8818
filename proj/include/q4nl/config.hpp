#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "q4nl/grid.hpp"
#include "q4nl/initial.hpp"
#include "q4nl/morawetz.hpp"
#include "q4nl/propagator.hpp"
#include "q4nl/system.hpp"

namespace q4nl {

struct TimeConfig {
  double dt = 1e-3;
  double t_end = 1.0;
  long record_every = 1;

  bool operator==(const TimeConfig&) const = default;
};

struct InitialConfig {
  InitialKind kind = InitialKind::gaussian_packet;
  InitialParams params;
  std::uint64_t seed = 0;

  bool operator==(const InitialConfig&) const = default;
};

struct WeightConfig {
  WeightKind kind = WeightKind::quadratic;
  double epsilon_cells = 2.0;
  int window = 0;

  bool operator==(const WeightConfig&) const = default;
};

struct DiagnosticsConfig {
  std::vector<double> q_list{4.0};
  WeightConfig weight;
  bool interaction = false;
  double tolerance = 1e-6;  // relative Morawetz residual accepted by verify

  bool operator==(const DiagnosticsConfig&) const = default;
};

struct ScatteringConfig {
  std::vector<double> checkpoint_times;
  double horizon = 0.0;       // wave operator start time T
  double tolerance = 1e-3;    // accepted wave-operator round-trip error

  bool operator==(const ScatteringConfig&) const = default;
};

struct OutputConfig {
  std::string directory = "out";
  std::vector<std::string> formats{"csv", "checkpoint"};

  bool has(const std::string& format) const;
  bool operator==(const OutputConfig&) const = default;
};

struct RunConfig {
  GridSpec grid;
  SystemParams system;
  TimeConfig time;
  InitialConfig initial;
  DiagnosticsConfig diagnostics;
  ScatteringConfig scattering;
  OutputConfig output;

  /// Steps covering t_end at dt.
  StepPlan plan() const;
  WeightSpec weight(const Grid& grid) const;

  bool operator==(const RunConfig&) const = default;
};

/// Throws ConfigError naming the offending path.
void validate(const RunConfig& config);

/// JSON text to a validated config. Unknown keys are errors.
RunConfig parse_config(const std::string& text);
RunConfig load_config(const std::string& path);
std::string serialize_config(const RunConfig& config);

}  // namespace q4nl
