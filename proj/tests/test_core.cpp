#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "q4nl/error.hpp"
#include "q4nl/fft.hpp"
#include "q4nl/functionals.hpp"
#include "q4nl/initial.hpp"

using namespace q4nl;
using std::numbers::pi;

namespace {

FieldState plane_wave(const Grid& grid, int components, Complex amp, std::array<int, 3> modes) {
  auto s = FieldState::zeros(grid, components);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    double ph = 0.0;
    for (int a = 0; a < grid.dim(); ++a) ph += 2 * pi * modes[a] / grid.length() * grid.coordinate(a)[i];
    for (auto& f : s.u) f[i] = amp * std::polar(1.0, ph);
  }
  return s;
}

Bump centered(double a, double sigma) {
  Bump b;
  b.amplitude = a;
  b.sigma = sigma;
  return b;
}

FieldState packet(const Grid& grid, int n, double a, double sigma) {
  InitialParams ip;
  ip.bumps = {centered(a, sigma)};
  return make_initial(InitialKind::gaussian_packet, ip, grid, SystemParams::uniform(n, 1.0, 0, 1.0), 0);
}

}  // namespace

TEST_CASE("grid tables") {
  Grid g({2, 16, 8.0});
  CHECK(g.size() == 256);
  CHECK(g.spacing() == 0.5);
  CHECK(g.cell_volume() == 0.25);
  CHECK(g.axis_coordinates().front() == -4.0);
  CHECK(g.axis_wavenumbers()[1] == doctest::Approx(2 * pi / 8.0));
  CHECK(g.axis_wavenumbers()[8] == doctest::Approx(-8 * 2 * pi / 8.0));
  // Nyquist zeroed only in the odd-derivative table.
  const auto idx = g.flatten({8, 3, 0});
  CHECK(g.wavenumber(0)[idx] != 0.0);
  CHECK(g.wavenumber_odd(0)[idx] == 0.0);
  CHECK(g.unflatten(idx) == std::array<int, 3>{8, 3, 0});
  std::size_t layer = 0;
  for (auto m : g.boundary_mask()) layer += m;
  CHECK(layer == 256 - 8 * 8);
  CHECK(g.signed_offset(1, 15) == 2);
  CHECK(g.signed_offset(0, 8) == -8);
}

TEST_CASE("grid and system validation name the offending entry") {
  auto path_of = [](auto&& f) {
    try {
      f();
    } catch (const ConfigError& e) {
      return e.path();
    }
    return std::string("<none>");
  };
  CHECK(path_of([] { validate(GridSpec{4, 16, 1.0}); }) == "grid.d");
  CHECK(path_of([] { validate(GridSpec{1, 6, 1.0}); }) == "grid.n");
  CHECK(path_of([] { validate(GridSpec{1, 16, -1.0}); }) == "grid.L");

  auto sys = SystemParams::uniform(2, 2.0, 1, 1.0);
  CHECK_NOTHROW(validate(sys));
  auto asym = sys;
  asym.beta(0, 1) = 0.5;
  CHECK(path_of([&] { validate(asym); }) == "system.beta[0][1]");
  auto neg = sys;
  neg.lambda(1, 1) = -1.0;
  CHECK(path_of([&] { validate(neg); }) == "system.lambda[1][1]");
  auto nodiag = sys;
  nodiag.beta(1, 1) = 0.0;
  CHECK(path_of([&] { validate(nodiag); }) == "system.beta[1][1]");
  CHECK(path_of([] { validate(SystemParams::uniform(2, 0.5, 0, 1.0)); }) == "system.p");
  CHECK(path_of([] { validate(SystemParams::uniform(1, 1.0, 2, 1.0)); }) == "system.kappa");
  CHECK_NOTHROW(validate(SystemParams::uniform(1, 0.5, 0, 1.0)));
  CHECK_NOTHROW(validate(SystemParams::uniform(3, 1.0, 0, 0.0)));

  SystemParams mixed = SystemParams::uniform(2, 1.0, 0, 1.0);
  mixed.lambda = CouplingMatrix::constant(2, 0.25);
  const auto gamma = mixed.gamma();
  CHECK(gamma(0, 1) == 1.5);
}

TEST_CASE("transform round trip and Parseval") {
  Grid g({3, 16, 10.0});
  auto s = oracle::random_state(g, 1, 11, 1.0);
  const auto& f = s.u[0];
  auto back = fft::inverse_copy(g, fft::forward_copy(g, f));
  double err = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) err = std::max(err, std::abs(back[i] - f[i]));
  CHECK(err < 1e-13);
  const auto spec = fft::forward_copy(g, f);
  double phys = 0.0, four = 0.0;
  for (std::size_t i = 0; i < f.size(); ++i) {
    phys += std::norm(f[i]);
    four += std::norm(spec[i]);
  }
  phys *= g.cell_volume();
  four *= g.spectral_weight();
  CHECK(std::abs(phys - four) / phys < 1e-12);
}

TEST_CASE("Gaussian packet mass and L4 norm against quadrature") {
  Grid g({1, 256, 40.0});
  const auto s = packet(g, 1, 1.0, 1.0 / std::sqrt(2.0));  // exp(-x^2/2 / sigma^2) with sigma^2 = 1/2 -> e^{-x^2}
  const double mass_ref = oracle::integrate([](double x) { return std::exp(-2 * x * x); }, -20, 20);
  CHECK(mass(s, g)[0] == doctest::Approx(mass_ref).epsilon(1e-12));

  // |u|^2 = e^{-x^2}: mass is sqrt(pi).
  const auto s2 = packet(g, 1, 1.0, 1.0);
  const double sqrt_pi = oracle::integrate([](double x) { return std::exp(-x * x); }, -20, 20);
  CHECK(std::abs(mass(s2, g)[0] - sqrt_pi) < 1e-12);
  CHECK(mass(s2, g)[0] == doctest::Approx(1.7724539).epsilon(1e-7));

  const double l4_ref = std::pow(oracle::integrate([](double x) { return std::exp(-2 * x * x); }, -20, 20), 0.25);
  CHECK(std::abs(lq_norm(s2, g, 4.0)[0] - l4_ref) < 1e-12);
  CHECK(lq_norm(s2, g, 2.0)[0] * lq_norm(s2, g, 2.0)[0] == doctest::Approx(mass(s2, g)[0]).epsilon(1e-12));
  CHECK(lq_norm(s2, g, INFINITY)[0] == doctest::Approx(1.0).epsilon(1e-12));
  CHECK_THROWS_AS(lq_norm(s2, g, 0.5), ConfigError);
}

TEST_CASE("initial data contracts") {
  Grid g({2, 32, 16.0});
  const auto sys = SystemParams::uniform(2, 1.0, 0, 1.0);
  InitialParams zero;
  zero.bumps = {centered(0.0, 1.0)};
  const auto z = make_initial(InitialKind::gaussian_packet, zero, g, sys, 0);
  for (double m : mass(z, g)) CHECK(m == 0.0);

  InitialParams rp;
  rp.window = 1.0;
  const auto a = make_initial(InitialKind::random_schwartz, rp, g, sys, 42);
  const auto b = make_initial(InitialKind::random_schwartz, rp, g, sys, 42);
  const auto c = make_initial(InitialKind::random_schwartz, rp, g, sys, 43);
  CHECK(a == b);
  CHECK_FALSE(a == c);
  CHECK(lq_norm(a, g, INFINITY)[0] == doctest::Approx(1.0));

  InitialParams wide;
  wide.bumps = {centered(1.0, 4.0)};
  CHECK_THROWS_AS(make_initial(InitialKind::gaussian_packet, wide, g, sys, 0), BoundaryContamination);
  InitialParams off;
  off.bumps = {centered(1.0, 0.7)};
  off.bumps[0].center = {7.0, 0.0, 0.0};
  CHECK_THROWS_AS(make_initial(InitialKind::gaussian_packet, off, g, sys, 0), BoundaryContamination);

  InitialParams two;
  two.bumps = {centered(1.0, 0.7), centered(0.5, 0.7)};
  two.bumps[0].center = {-2.0, 0.0, 0.0};
  two.bumps[1].center = {2.0, 1.0, 0.0};
  two.component_scale = {1.0, 0.0};
  const auto mb = make_initial(InitialKind::multi_bump, two, g, sys, 0);
  CHECK(mass(mb, g)[0] > 0.0);
  CHECK(mass(mb, g)[1] == 0.0);
  CHECK(parse_initial_kind(to_string(InitialKind::multi_bump)) == InitialKind::multi_bump);
  CHECK_THROWS_AS(parse_initial_kind("square"), ConfigError);
}

TEST_CASE("plane-wave functionals") {
  Grid g({3, 8, 2 * pi});
  const Complex amp(0.6, -0.3);
  const auto s = plane_wave(g, 1, amp, {1, 2, 0});
  const double vol = std::pow(2 * pi, 3);
  const double k2 = 5.0;
  CHECK(mass(s, g)[0] == doctest::Approx(std::norm(amp) * vol).epsilon(1e-13));
  for (double q : {1.0, 3.0, 7.5}) CHECK(lq_norm(s, g, q)[0] == doctest::Approx(std::abs(amp) * std::pow(vol, 1 / q)));

  auto sys = SystemParams::uniform(1, 2.0, 1, 0.7);
  const auto e = energy(s, g, sys);
  const double a2 = std::norm(amp);
  CHECK(e.kinetic_biharmonic == doctest::Approx(a2 * k2 * k2 * vol).epsilon(1e-12));
  CHECK(e.kinetic_gradient == doctest::Approx(a2 * k2 * vol).epsilon(1e-12));
  CHECK(e.potential == doctest::Approx(0.7 * std::pow(a2, 3.0) * vol / 3.0).epsilon(1e-12));
  CHECK(e.total == doctest::Approx(e.kinetic_biharmonic + e.kinetic_gradient + e.potential));
  sys.kappa = 0;
  CHECK(energy(s, g, sys).kinetic_gradient == 0.0);

  CHECK(sobolev_h2_norm(s, g)[0] == doctest::Approx(std::abs(amp) * std::sqrt(vol) * (1 + k2)).epsilon(1e-12));
  const auto flat = plane_wave(g, 1, amp, {0, 0, 0});
  CHECK(sobolev_h2_norm(flat, g)[0] == doctest::Approx(std::abs(amp) * std::sqrt(vol)).epsilon(1e-12));

  const auto dens = densities(s, g, 0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(dens.mass[i] == doctest::Approx(a2));
    CHECK(dens.momentum[0][i] == doctest::Approx(a2 * 1.0));
    CHECK(dens.momentum[1][i] == doctest::Approx(a2 * 2.0));
    CHECK(std::abs(dens.momentum[2][i]) < 1e-14);
  }
  CHECK_THROWS_AS(densities(s, g, 1), Error);
}

TEST_CASE("zero field and real field") {
  Grid g({2, 16, 10.0});
  const auto z = FieldState::zeros(g, 2);
  const auto sys = SystemParams::uniform(2, 1.0, 1, 1.0);
  const auto e = energy(z, g, sys);
  CHECK(e.total == 0.0);
  CHECK(e.potential == 0.0);
  CHECK(h2_norm_total(z, g) == 0.0);
  CHECK(boundary_fraction(z, g) == 0.0);
  const auto dz = densities(z, g, 1);
  for (const auto& j : dz.momentum)
    for (double v : j) CHECK(v == 0.0);

  auto r = oracle::random_state(g, 1, 3, 1.0);
  for (auto& v : r.u[0]) v = Complex(v.real(), 0.0);
  const auto dr = densities(r, g, 0);
  double jmax = 0.0;
  for (const auto& j : dr.momentum)
    for (double v : j) jmax = std::max(jmax, std::abs(v));
  CHECK(jmax < 1e-13);
}

TEST_CASE("second component zero") {
  Grid g({1, 128, 30.0});
  auto s = packet(g, 2, 1.0, 1.0);
  s.u[1].assign(g.size(), Complex{});
  const auto m = mass(s, g);
  CHECK(m[0] > 1.7);
  CHECK(m[1] == 0.0);
}

TEST_CASE("functionals are gauge invariant per component") {
  Grid g({2, 32, 16.0});
  auto sys = SystemParams::uniform(2, 1.5, 1, 0.0);
  sys.beta = CouplingMatrix(2, {1.0, 0.4, 0.4, 2.0});
  sys.lambda = CouplingMatrix(2, {0.1, 0.2, 0.2, 0.0});
  const auto s = oracle::random_state(g, 2, 5, 1.2);
  auto r = s;
  for (auto& v : r.u[0]) v *= std::polar(1.0, 0.9);
  for (auto& v : r.u[1]) v *= std::polar(1.0, -2.3);
  CHECK(energy(r, g, sys).total == doctest::Approx(energy(s, g, sys).total).epsilon(1e-13));
  CHECK(h2_norm_total(r, g) == doctest::Approx(h2_norm_total(s, g)).epsilon(1e-13));
  CHECK(lq_norm_total(r, g, 3.0) == doctest::Approx(lq_norm_total(s, g, 3.0)).epsilon(1e-13));
  CHECK(mass(r, g)[1] == doctest::Approx(mass(s, g)[1]).epsilon(1e-13));
  const auto j0 = densities(s, g, 0).momentum[1];
  const auto j1 = densities(r, g, 0).momentum[1];
  for (std::size_t i = 0; i < j0.size(); i += 17) CHECK(j1[i] == doctest::Approx(j0[i]).epsilon(1e-9));
}

TEST_CASE("potential energy is invariant under component permutation") {
  Grid g({1, 128, 30.0});
  SystemParams sys = SystemParams::uniform(3, 2.0, 0, 0.0);
  sys.beta = CouplingMatrix(3, {1.0, 0.2, 0.5, 0.2, 2.0, 0.1, 0.5, 0.1, 3.0});
  sys.lambda = CouplingMatrix(3, {0.3, 0.0, 0.1, 0.0, 0.0, 0.4, 0.1, 0.4, 0.2});
  const auto s = oracle::random_state(g, 3, 9, 1.0);
  const int perm[3] = {2, 0, 1};
  SystemParams ps = sys;
  FieldState t = s;
  for (int a = 0; a < 3; ++a) {
    t.u[a] = s.u[perm[a]];
    for (int b = 0; b < 3; ++b) {
      ps.beta(a, b) = sys.beta(perm[a], perm[b]);
      ps.lambda(a, b) = sys.lambda(perm[a], perm[b]);
    }
  }
  CHECK(energy(t, g, ps).potential == doctest::Approx(energy(s, g, sys).potential).epsilon(1e-13));
}

TEST_CASE("density momentum vanishes where mass vanishes") {
  Grid g({1, 256, 40.0});
  const auto s = oracle::random_state(g, 1, 21, 1.0);
  const auto d = densities(s, g, 0);
  for (std::size_t i = 0; i < g.size(); ++i) {
    CHECK(d.mass[i] >= 0.0);
    if (d.mass[i] < 1e-30) CHECK(std::abs(d.momentum[0][i]) < 1e-14);
  }
}

TEST_CASE("h2 distance and boundary mass") {
  Grid g({1, 64, 20.0});
  const auto a = packet(g, 1, 1.0, 1.0);
  CHECK(h2_distance(a, a, g) == 0.0);
  auto b = FieldState::zeros(g, 1);
  CHECK(h2_distance(a, b, g) == doctest::Approx(h2_norm_total(a, g)));
  b.u[0][0] = 1.0;
  CHECK(boundary_mass(b, g) == doctest::Approx(g.cell_volume()));
  CHECK(boundary_fraction(b, g) == 1.0);
}
