#include "q4nl/functionals.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "q4nl/error.hpp"
#include "q4nl/fft.hpp"
#include "q4nl/reduce.hpp"

namespace q4nl {

void check_shape(const FieldState& state, const Grid& grid, int components) {
  if (state.components() != components)
    throw Error("state has " + std::to_string(state.components()) + " components, expected " +
                std::to_string(components));
  for (const auto& f : state.u)
    if (f.size() != grid.size()) throw Error("field size does not match grid");
}

bool FieldState::all_finite() const {
  for (const auto& f : u)
    for (const auto& v : f)
      if (!std::isfinite(v.real()) || !std::isfinite(v.imag())) return false;
  return true;
}

namespace spectral {

std::vector<ComplexField> gradient(const Grid& grid, const ComplexField& spectrum) {
  const int d = grid.dim();
  std::vector<ComplexField> out(static_cast<std::size_t>(d), ComplexField(grid.size()));
  for (int a = 0; a < d; ++a) {
    const auto& k = grid.wavenumber_odd(a);
    auto& g = out[static_cast<std::size_t>(a)];
    for (std::size_t i = 0; i < grid.size(); ++i) g[i] = Complex(0.0, k[i]) * spectrum[i];
    fft::inverse(grid, g);
  }
  return out;
}

std::vector<ComplexField> hessian(const Grid& grid, const ComplexField& spectrum) {
  const int d = grid.dim();
  const auto dd = static_cast<std::size_t>(d);
  std::vector<ComplexField> out(dd * dd);
  for (int a = 0; a < d; ++a) {
    for (int b = a; b < d; ++b) {
      ComplexField h(grid.size());
      const auto& ka = a == b ? grid.wavenumber(a) : grid.wavenumber_odd(a);
      const auto& kb = a == b ? grid.wavenumber(b) : grid.wavenumber_odd(b);
      for (std::size_t i = 0; i < grid.size(); ++i) h[i] = -ka[i] * kb[i] * spectrum[i];
      fft::inverse(grid, h);
      out[static_cast<std::size_t>(a) * dd + static_cast<std::size_t>(b)] = h;
      if (a != b) out[static_cast<std::size_t>(b) * dd + static_cast<std::size_t>(a)] = std::move(h);
    }
  }
  return out;
}

ComplexField laplacian(const Grid& grid, const ComplexField& spectrum) {
  ComplexField out(grid.size());
  const auto& k2 = grid.wavenumber_squared();
  for (std::size_t i = 0; i < grid.size(); ++i) out[i] = -k2[i] * spectrum[i];
  fft::inverse(grid, out);
  return out;
}

std::vector<RealField> gradient_real(const Grid& grid, const RealField& field) {
  const auto spectrum = fft::forward_real(grid, field);
  auto g = gradient(grid, spectrum);
  std::vector<RealField> out(g.size(), RealField(grid.size()));
  for (std::size_t a = 0; a < g.size(); ++a)
    for (std::size_t i = 0; i < grid.size(); ++i) out[a][i] = g[a][i].real();
  return out;
}

}  // namespace spectral

std::vector<double> mass(const FieldState& state, const Grid& grid) {
  std::vector<double> out;
  out.reserve(state.u.size());
  for (const auto& f : state.u)
    out.push_back(grid.cell_volume() * pairwise_sum(f.size(), [&](std::size_t i) { return std::norm(f[i]); }));
  return out;
}

double coupled_power_density(const FieldState& state, const CouplingMatrix& gamma, double p, std::size_t i) {
  const int n = state.components();
  double acc = 0.0;
  for (int mu = 0; mu < n; ++mu) {
    const double a2 = std::norm(state.u[static_cast<std::size_t>(mu)][i]);
    for (int nu = 0; nu < n; ++nu) {
      const double g = gamma(mu, nu);
      if (g == 0.0) continue;
      const double b2 = std::norm(state.u[static_cast<std::size_t>(nu)][i]);
      acc += g * std::pow(a2 * b2, 0.5 * (p + 1.0));
    }
  }
  return acc;
}

Energy energy(const FieldState& state, const Grid& grid, const SystemParams& sys) {
  Energy e;
  const auto& k2 = grid.wavenumber_squared();
  const double w = grid.spectral_weight();
  for (const auto& f : state.u) {
    const auto spectrum = fft::forward_copy(grid, f);
    e.kinetic_biharmonic +=
        w * pairwise_sum(spectrum.size(), [&](std::size_t i) { return k2[i] * k2[i] * std::norm(spectrum[i]); });
    if (sys.kappa != 0)
      e.kinetic_gradient +=
          sys.kappa * w * pairwise_sum(spectrum.size(), [&](std::size_t i) { return k2[i] * std::norm(spectrum[i]); });
  }
  const auto gamma = sys.gamma();
  if (!gamma.is_zero()) {
    e.potential = grid.cell_volume() / (sys.p + 1.0) *
                  pairwise_sum(grid.size(), [&](std::size_t i) { return coupled_power_density(state, gamma, sys.p, i); });
  }
  e.total = e.kinetic_biharmonic + e.kinetic_gradient + e.potential;
  return e;
}

std::vector<double> lq_norm(const FieldState& state, const Grid& grid, double q) {
  if (!(q >= 1.0)) throw ConfigError("L^q norm requires q >= 1");
  std::vector<double> out;
  out.reserve(state.u.size());
  for (const auto& f : state.u) {
    if (std::isinf(q)) {
      double m = 0.0;
      for (const auto& v : f) m = std::max(m, std::abs(v));
      out.push_back(m);
    } else {
      const double s = pairwise_sum(f.size(), [&](std::size_t i) { return std::pow(std::abs(f[i]), q); });
      out.push_back(std::pow(grid.cell_volume() * s, 1.0 / q));
    }
  }
  return out;
}

namespace {

double l2_combine(const std::vector<double>& values) {
  double s = 0.0;
  for (double v : values) s += v * v;
  return std::sqrt(s);
}

double h2_norm_squared(const Grid& grid, const ComplexField& f) {
  const auto spectrum = fft::forward_copy(grid, f);
  const auto& k2 = grid.wavenumber_squared();
  return grid.spectral_weight() * pairwise_sum(spectrum.size(), [&](std::size_t i) {
           const double m = 1.0 + k2[i];
           return m * m * std::norm(spectrum[i]);
         });
}

}  // namespace

double lq_norm_total(const FieldState& state, const Grid& grid, double q) { return l2_combine(lq_norm(state, grid, q)); }

std::vector<double> sobolev_h2_norm(const FieldState& state, const Grid& grid) {
  std::vector<double> out;
  out.reserve(state.u.size());
  for (const auto& f : state.u) out.push_back(std::sqrt(h2_norm_squared(grid, f)));
  return out;
}

double h2_norm_total(const FieldState& state, const Grid& grid) { return l2_combine(sobolev_h2_norm(state, grid)); }

double h2_distance(const FieldState& a, const FieldState& b, const Grid& grid) {
  if (a.components() != b.components()) throw Error("component count mismatch");
  double s = 0.0;
  for (std::size_t c = 0; c < a.u.size(); ++c) {
    ComplexField diff(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) diff[i] = a.u[c][i] - b.u[c][i];
    s += h2_norm_squared(grid, diff);
  }
  return std::sqrt(s);
}

DensityPair densities(const FieldState& state, const Grid& grid, int component) {
  if (component < 0 || component >= state.components()) throw Error("component index out of range");
  const auto& f = state.u[static_cast<std::size_t>(component)];
  DensityPair out;
  out.mass.resize(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) out.mass[i] = std::norm(f[i]);
  const auto grad = spectral::gradient(grid, fft::forward_copy(grid, f));
  out.momentum.assign(grad.size(), RealField(grid.size()));
  for (std::size_t a = 0; a < grad.size(); ++a)
    for (std::size_t i = 0; i < grid.size(); ++i) out.momentum[a][i] = (std::conj(f[i]) * grad[a][i]).imag();
  return out;
}

double boundary_mass(const FieldState& state, const Grid& grid) {
  const auto& mask = grid.boundary_mask();
  double total = 0.0;
  for (const auto& f : state.u)
    total += pairwise_sum(f.size(), [&](std::size_t i) { return mask[i] ? std::norm(f[i]) : 0.0; });
  return grid.cell_volume() * total;
}

double boundary_fraction(const FieldState& state, const Grid& grid) {
  double total = 0.0;
  for (double m : mass(state, grid)) total += m;
  if (total == 0.0) return 0.0;
  return boundary_mass(state, grid) / total;
}

}  // namespace q4nl
