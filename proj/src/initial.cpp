#include "q4nl/initial.hpp"

#include <cmath>
#include <cstdio>
#include <random>

#include "q4nl/error.hpp"
#include "q4nl/fft.hpp"
#include "q4nl/functionals.hpp"

namespace q4nl {

std::string to_string(InitialKind kind) {
  switch (kind) {
    case InitialKind::gaussian_packet: return "gaussian_packet";
    case InitialKind::multi_bump: return "multi_bump";
    case InitialKind::random_schwartz: return "random_schwartz";
  }
  return "unknown";
}

InitialKind parse_initial_kind(const std::string& name) {
  if (name == "gaussian_packet") return InitialKind::gaussian_packet;
  if (name == "multi_bump") return InitialKind::multi_bump;
  if (name == "random_schwartz") return InitialKind::random_schwartz;
  throw ConfigError("unknown initial kind '" + name + "'", "initial.kind");
}

namespace {

void add_bump(const Grid& grid, const Bump& b, double scale, ComplexField& out) {
  if (!(b.sigma > 0.0)) throw ConfigError("sigma must be positive", "initial.params.sigma");
  const int d = grid.dim();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double r2 = 0.0;
    double phase = 0.0;
    for (int a = 0; a < d; ++a) {
      const double x = grid.coordinate(a)[i];
      const double dx = x - b.center[static_cast<std::size_t>(a)];
      r2 += dx * dx;
      phase += b.velocity[static_cast<std::size_t>(a)] * x;
    }
    out[i] += scale * b.amplitude * std::exp(-r2 / (2.0 * b.sigma * b.sigma)) * std::polar(1.0, phase);
  }
}

ComplexField random_field(const Grid& grid, const InitialParams& params, std::mt19937_64& rng) {
  if (!(params.k_width > 0.0)) throw ConfigError("k_width must be positive", "initial.params.k_width");
  if (!(params.window > 0.0)) throw ConfigError("window must be positive", "initial.params.window");
  std::normal_distribution<double> normal(0.0, 1.0);
  const auto& k2 = grid.wavenumber_squared();
  ComplexField f(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    f[i] = Complex(re, im) * std::exp(-k2[i] / (2.0 * params.k_width * params.k_width));
  }
  fft::inverse(grid, f);
  double peak = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double r2 = 0.0;
    for (int a = 0; a < grid.dim(); ++a) r2 += grid.coordinate(a)[i] * grid.coordinate(a)[i];
    f[i] *= std::exp(-r2 / (2.0 * params.window * params.window));
    peak = std::max(peak, std::abs(f[i]));
  }
  if (peak > 0.0)
    for (auto& v : f) v *= params.amplitude / peak;
  return f;
}

std::string format_fraction(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3g", v);
  return buf;
}

}  // namespace

FieldState make_initial(InitialKind kind, const InitialParams& params, const Grid& grid, const SystemParams& sys,
                        std::uint64_t seed) {
  const int n = sys.components;
  if (!params.component_scale.empty() && params.component_scale.size() != static_cast<std::size_t>(n))
    throw ConfigError("needs one entry per component", "initial.params.component_scale");
  if (kind != InitialKind::random_schwartz && params.bumps.empty())
    throw ConfigError("at least one bump is required", "initial.params.bumps");

  auto state = FieldState::zeros(grid, n);
  std::mt19937_64 rng(seed);
  for (int mu = 0; mu < n; ++mu) {
    const double scale = params.component_scale.empty() ? 1.0 : params.component_scale[static_cast<std::size_t>(mu)];
    auto& f = state.u[static_cast<std::size_t>(mu)];
    switch (kind) {
      case InitialKind::gaussian_packet: add_bump(grid, params.bumps.front(), scale, f); break;
      case InitialKind::multi_bump:
        for (const auto& b : params.bumps) add_bump(grid, b, scale, f);
        break;
      case InitialKind::random_schwartz: {
        f = random_field(grid, params, rng);
        for (auto& v : f) v *= scale;
        break;
      }
    }
  }
  const double frac = boundary_fraction(state, grid);
  if (frac > kBoundaryThreshold)
    throw BoundaryContamination("boundary contamination: initial data puts a fraction " + format_fraction(frac) +
                                " of the mass within " + std::to_string(kBoundaryCells) + " cells of the boundary");
  return state;
}

}  // namespace q4nl
