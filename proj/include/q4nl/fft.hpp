#pragma once

#include "q4nl/grid.hpp"

namespace q4nl::fft {

/// In-place unnormalized forward DFT over all axes of the grid.
void forward(const Grid& grid, ComplexField& data);

/// In-place inverse DFT; carries the 1/M factor so inverse(forward(f)) == f.
void inverse(const Grid& grid, ComplexField& data);

inline ComplexField forward_copy(const Grid& grid, ComplexField data) {
  forward(grid, data);
  return data;
}

inline ComplexField inverse_copy(const Grid& grid, ComplexField data) {
  inverse(grid, data);
  return data;
}

/// Forward transform of a real field.
ComplexField forward_real(const Grid& grid, const RealField& data);

}  // namespace q4nl::fft
