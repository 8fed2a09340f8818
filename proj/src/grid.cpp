#include "q4nl/grid.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "q4nl/error.hpp"

namespace q4nl {

void validate(const GridSpec& spec) {
  if (spec.dimension < 1 || spec.dimension > 3)
    throw ConfigError("dimension must be 1, 2 or 3 (got " + std::to_string(spec.dimension) + ")", "grid.d");
  if (spec.points_per_axis < 8)
    throw ConfigError("at least 8 points per axis are required", "grid.n");
  if (spec.points_per_axis % 2 != 0)
    throw ConfigError("points per axis must be even", "grid.n");
  if (!(spec.side_length > 0.0) || !std::isfinite(spec.side_length))
    throw ConfigError("side length must be positive and finite", "grid.L");
}

Grid::Grid(GridSpec spec) {
  validate(spec);
  auto data = std::make_shared<Data>();
  data->spec = spec;
  const int d = spec.dimension;
  const int n = spec.points_per_axis;
  const double L = spec.side_length;
  data->spacing = L / n;
  data->cell_volume = std::pow(data->spacing, d);
  std::size_t size = 1;
  for (int a = 0; a < d; ++a) size *= static_cast<std::size_t>(n);
  data->size = size;

  data->axis_x.resize(static_cast<std::size_t>(n));
  data->axis_k.resize(static_cast<std::size_t>(n));
  for (int j = 0; j < n; ++j) {
    data->axis_x[static_cast<std::size_t>(j)] = -0.5 * L + j * data->spacing;
    const int m = j < n / 2 ? j : j - n;
    data->axis_k[static_cast<std::size_t>(j)] = 2.0 * std::numbers::pi * m / L;
  }

  data->k2.assign(size, 0.0);
  data->boundary.assign(size, 0);
  for (int a = 0; a < d; ++a) {
    data->x[static_cast<std::size_t>(a)].resize(size);
    data->k[static_cast<std::size_t>(a)].resize(size);
    data->k_odd[static_cast<std::size_t>(a)].resize(size);
  }
  this->data_ = data;

  for (std::size_t f = 0; f < size; ++f) {
    const auto idx = unflatten(f);
    for (int a = 0; a < d; ++a) {
      const auto j = static_cast<std::size_t>(idx[static_cast<std::size_t>(a)]);
      const double kv = data->axis_k[j];
      data->x[static_cast<std::size_t>(a)][f] = data->axis_x[j];
      data->k[static_cast<std::size_t>(a)][f] = kv;
      data->k_odd[static_cast<std::size_t>(a)][f] = (static_cast<int>(j) == n / 2) ? 0.0 : kv;
      data->k2[f] += kv * kv;
      if (static_cast<int>(j) < kBoundaryCells || static_cast<int>(j) >= n - kBoundaryCells) data->boundary[f] = 1;
    }
  }
}

std::array<int, 3> Grid::unflatten(std::size_t flat) const noexcept {
  std::array<int, 3> idx{0, 0, 0};
  const auto n = static_cast<std::size_t>(this->n());
  for (int a = dim() - 1; a >= 0; --a) {
    idx[static_cast<std::size_t>(a)] = static_cast<int>(flat % n);
    flat /= n;
  }
  return idx;
}

std::size_t Grid::flatten(const std::array<int, 3>& index) const noexcept {
  std::size_t flat = 0;
  const auto n = static_cast<std::size_t>(this->n());
  for (int a = 0; a < dim(); ++a) flat = flat * n + static_cast<std::size_t>(index[static_cast<std::size_t>(a)]);
  return flat;
}

int Grid::signed_offset(int i, int j) const noexcept {
  const int n = this->n();
  int m = ((i - j) % n + n) % n;
  return m < n / 2 ? m : m - n;
}

}  // namespace q4nl
