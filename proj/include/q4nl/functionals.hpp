#pragma once

#include <vector>

#include "q4nl/field.hpp"
#include "q4nl/grid.hpp"
#include "q4nl/system.hpp"

namespace q4nl {

namespace spectral {

/// Physical-space gradient (d fields) from the forward transform of a field.
std::vector<ComplexField> gradient(const Grid& grid, const ComplexField& spectrum);

/// Physical-space Hessian as d*d fields, entry (a, b) at index a*d + b.
std::vector<ComplexField> hessian(const Grid& grid, const ComplexField& spectrum);

ComplexField laplacian(const Grid& grid, const ComplexField& spectrum);

/// Real gradient of a real field.
std::vector<RealField> gradient_real(const Grid& grid, const RealField& field);

}  // namespace spectral

struct Energy {
  double kinetic_biharmonic = 0.0;
  double kinetic_gradient = 0.0;
  double potential = 0.0;
  double total = 0.0;
};

/// Per-component mass h^d sum |u_mu|^2.
std::vector<double> mass(const FieldState& state, const Grid& grid);

Energy energy(const FieldState& state, const Grid& grid, const SystemParams& sys);

/// Per-component L^q norms; q = infinity gives the max norm. Throws for q < 1.
std::vector<double> lq_norm(const FieldState& state, const Grid& grid, double q);

/// l2 combination of the component L^q norms.
double lq_norm_total(const FieldState& state, const Grid& grid, double q);

/// Per-component H^2 norm with multiplier (1 + |k|^2).
std::vector<double> sobolev_h2_norm(const FieldState& state, const Grid& grid);

/// l2 combination of the component H^2 norms.
double h2_norm_total(const FieldState& state, const Grid& grid);

/// H^2 norm (l2 over components) of a - b.
double h2_distance(const FieldState& a, const FieldState& b, const Grid& grid);

struct DensityPair {
  RealField mass;                    // |u|^2
  std::vector<RealField> momentum;   // Im(conj(u) grad u), one field per axis
};

/// Densities of one component (0-based index).
DensityPair densities(const FieldState& state, const Grid& grid, int component);

/// Total mass (all components) within kBoundaryCells of the box boundary.
double boundary_mass(const FieldState& state, const Grid& grid);

/// boundary_mass / total mass, 0 for the zero state.
double boundary_fraction(const FieldState& state, const Grid& grid);

/// Pointwise sum_{mu nu} gamma_{mu nu} |u_mu|^{p+1} |u_nu|^{p+1} at flat index i.
double coupled_power_density(const FieldState& state, const CouplingMatrix& gamma, double p, std::size_t i);

}  // namespace q4nl
