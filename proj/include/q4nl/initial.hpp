#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "q4nl/field.hpp"
#include "q4nl/grid.hpp"
#include "q4nl/system.hpp"

namespace q4nl {

enum class InitialKind { gaussian_packet, multi_bump, random_schwartz };

std::string to_string(InitialKind kind);
InitialKind parse_initial_kind(const std::string& name);

/// A * exp(-|x - x0|^2 / (2 sigma^2)) * exp(i v.x)
struct Bump {
  double amplitude = 1.0;
  double sigma = 1.0;
  std::array<double, 3> center{};
  std::array<double, 3> velocity{};

  bool operator==(const Bump&) const = default;
};

struct InitialParams {
  // gaussian_packet uses bumps[0]; multi_bump sums all of them.
  std::vector<Bump> bumps{Bump{}};
  // random_schwartz: Gaussian spectral envelope of width k_width, spatial
  // Gaussian window of width window, rescaled to peak modulus amplitude.
  double amplitude = 1.0;
  double k_width = 2.0;
  double window = 2.0;
  // Per-component factor; empty means 1 for every component.
  std::vector<double> component_scale;

  bool operator==(const InitialParams&) const = default;
};

/// Deterministic for a fixed seed. Throws BoundaryContamination when more than
/// kBoundaryThreshold of the mass sits in the boundary layer.
FieldState make_initial(InitialKind kind, const InitialParams& params, const Grid& grid, const SystemParams& sys,
                        std::uint64_t seed);

}  // namespace q4nl
