#pragma once

#include <array>
#include <complex>
#include <cstddef>
#include <memory>
#include <vector>

namespace q4nl {

using Complex = std::complex<double>;
using ComplexField = std::vector<Complex>;
using RealField = std::vector<double>;

/// Mass fraction in the boundary layer above which diagnostics are no longer
/// representative of the problem on the whole space.
inline constexpr double kBoundaryThreshold = 1e-8;

/// Width of the boundary layer, in grid cells.
inline constexpr int kBoundaryCells = 4;

struct GridSpec {
  int dimension = 1;
  int points_per_axis = 64;
  double side_length = 20.0;

  bool operator==(const GridSpec&) const = default;
};

/// Periodic box [-L/2, L/2)^d sampled at n points per axis.
///
/// Flat indices are row-major with axis 0 slowest. Grid is an immutable value:
/// copies share the precomputed coordinate and wavenumber tables.
class Grid {
 public:
  explicit Grid(GridSpec spec);

  const GridSpec& spec() const noexcept { return data_->spec; }
  int dim() const noexcept { return data_->spec.dimension; }
  int n() const noexcept { return data_->spec.points_per_axis; }
  double length() const noexcept { return data_->spec.side_length; }
  double spacing() const noexcept { return data_->spacing; }
  std::size_t size() const noexcept { return data_->size; }

  /// Quadrature weight h^d of every spatial integral.
  double cell_volume() const noexcept { return data_->cell_volume; }
  /// Weight turning sum_k |DFT(f)_k|^2 into the integral of |f|^2 (h^d / M).
  double spectral_weight() const noexcept { return data_->cell_volume / static_cast<double>(data_->size); }

  /// Coordinate x_j = -L/2 + j h along one axis (length n).
  const std::vector<double>& axis_coordinates() const noexcept { return data_->axis_x; }
  /// Signed FFT wavenumbers 2 pi m / L along one axis (length n).
  const std::vector<double>& axis_wavenumbers() const noexcept { return data_->axis_k; }

  /// Per-point coordinate of the given axis (length M).
  const RealField& coordinate(int axis) const { return data_->x[static_cast<std::size_t>(axis)]; }
  /// Per-point wavenumber of the given axis (length M).
  const RealField& wavenumber(int axis) const { return data_->k[static_cast<std::size_t>(axis)]; }
  /// Same as wavenumber() with the Nyquist entry zeroed; used for odd-order derivatives.
  const RealField& wavenumber_odd(int axis) const { return data_->k_odd[static_cast<std::size_t>(axis)]; }
  /// |k|^2 per point.
  const RealField& wavenumber_squared() const noexcept { return data_->k2; }
  /// Nonzero on points within kBoundaryCells of the box boundary along any axis.
  const std::vector<unsigned char>& boundary_mask() const noexcept { return data_->boundary; }

  /// Per-axis index of a flat index (unused trailing axes are 0).
  std::array<int, 3> unflatten(std::size_t flat) const noexcept;
  std::size_t flatten(const std::array<int, 3>& index) const noexcept;

  /// Signed offset in [-n/2, n/2) of the periodic index difference i - j.
  int signed_offset(int i, int j) const noexcept;

  bool operator==(const Grid& other) const noexcept { return spec() == other.spec(); }

 private:
  struct Data {
    GridSpec spec;
    double spacing = 0.0;
    double cell_volume = 0.0;
    std::size_t size = 0;
    std::vector<double> axis_x;
    std::vector<double> axis_k;
    std::array<RealField, 3> x;
    std::array<RealField, 3> k;
    std::array<RealField, 3> k_odd;
    RealField k2;
    std::vector<unsigned char> boundary;
  };
  std::shared_ptr<const Data> data_;
};

void validate(const GridSpec& spec);

}  // namespace q4nl
