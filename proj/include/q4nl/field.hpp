#pragma once

#include <cstddef>
#include <vector>

#include "q4nl/grid.hpp"

namespace q4nl {

/// N complex fields sampled on a grid, at time t.
struct FieldState {
  double t = 0.0;
  std::vector<ComplexField> u;

  static FieldState zeros(const Grid& grid, int components, double t = 0.0) {
    return FieldState{t, std::vector<ComplexField>(static_cast<std::size_t>(components), ComplexField(grid.size()))};
  }

  int components() const noexcept { return static_cast<int>(u.size()); }
  bool all_finite() const;

  bool operator==(const FieldState&) const = default;
};

/// Throws if the state does not have `components` fields of grid.size() points.
void check_shape(const FieldState& state, const Grid& grid, int components);

}  // namespace q4nl
