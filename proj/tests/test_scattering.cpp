#include <cmath>
#include <numbers>

#include "doctest.h"
#include "oracles.hpp"
#include "q4nl/error.hpp"
#include "q4nl/functionals.hpp"
#include "q4nl/initial.hpp"
#include "q4nl/propagator.hpp"
#include "q4nl/scattering.hpp"

using namespace q4nl;
using std::numbers::pi;

namespace {

FieldState packet(const Grid& g, const SystemParams& sys, double a, double sigma, double v = 0.0) {
  InitialParams ip;
  ip.bumps[0].amplitude = a;
  ip.bumps[0].sigma = sigma;
  ip.bumps[0].velocity = {v, 0.0, 0.0};
  return make_initial(InitialKind::gaussian_packet, ip, g, sys, 0);
}

// Periodic shift by whole cells along axis 0.
FieldState roll(const FieldState& s, const Grid& g, int shift) {
  auto out = s;
  for (std::size_t c = 0; c < s.u.size(); ++c)
    for (std::size_t i = 0; i < g.size(); ++i) {
      auto idx = g.unflatten(i);
      idx[0] = (idx[0] + shift + g.n()) % g.n();
      out.u[c][g.flatten(idx)] = s.u[c][i];
    }
  return out;
}

}  // namespace

TEST_CASE("exponent windows") {
  auto c = check_exponents(3, Rational(1), 1);
  CHECK_FALSE(c.scattering_ok);
  CHECK(c.decay_ok);
  CHECK_FALSE(c.p_star.has_value());
  CHECK(c.in_theorem_range);

  c = check_exponents(5, Rational(3), 1);
  REQUIRE(c.p_star.has_value());
  CHECK(*c.p_star == Rational(4));
  CHECK(c.scattering_ok);

  c = check_exponents(4, Rational(2), 1);
  CHECK_FALSE(c.p_star.has_value());
  CHECK(c.scattering_ok);

  CHECK(*check_exponents(8, Rational(1, 2), 1).p_star == Rational(1));
  CHECK_FALSE(check_exponents(5, Rational(4), 1).decay_ok);
  CHECK_FALSE(check_exponents(3, Rational(4, 3), 1).scattering_ok);  // p d = 4 exactly
  CHECK(check_exponents(3, 4.0 / 3.0 + 1e-3, 1).scattering_ok);
  CHECK(check_exponents(3, Rational(1, 2), 1).decay_ok);
  CHECK_FALSE(check_exponents(3, Rational(1, 2), 2).decay_ok);
  CHECK_FALSE(check_exponents(1, Rational(5), 1).in_theorem_range);
  CHECK_FALSE(check_exponents(3, Rational(0), 1).decay_ok);
  CHECK_NOTHROW(check_exponents(12, Rational(-1), 0));
  CHECK_FALSE(check_exponents(3, NAN, 1).decay_ok);
}

TEST_CASE("raising p across 4/d flips only the scattering flag") {
  for (int d = 3; d <= 8; ++d) {
    bool seen_on = false;
    bool prev_decay = true;
    for (int k = 1; k < 400; ++k) {
      const Rational p(k, 100);
      const auto c = check_exponents(d, p, 1);
      const bool below = !c.p_star || p < *c.p_star;
      if (!below) break;
      CHECK(c.decay_ok);
      CHECK(prev_decay == c.decay_ok);
      if (seen_on) CHECK(c.scattering_ok);  // once on, stays on below p*
      seen_on = seen_on || c.scattering_ok;
      CHECK(c.scattering_ok == (p >= 1 && p * d > 4));
      prev_decay = c.decay_ok;
    }
  }
}

TEST_CASE("admissible pairs") {
  for (int n = 1; n <= 8; ++n) CHECK(admissible_pair(Exponent::inf(), Exponent::of(2), n));
  const auto [q, r] = pair_from_p(Rational(1), 4);
  CHECK(q == Exponent::of(4));
  CHECK(r == Exponent::of(4));
  CHECK_FALSE(admissible_pair(Exponent::of(2), Exponent::inf(), 4));
  CHECK_FALSE(admissible_pair(Exponent::of(3), Exponent::of(4), 3));
  CHECK_FALSE(admissible_pair(Exponent::of(Rational(3, 2)), Exponent::of(6), 3));  // q < 2
  CHECK(admissible_pair(Exponent::of(4), Exponent::of(6), 3));
  CHECK_THROWS_AS(pair_from_p(Rational(0), 3), Error);

  // Every p in (0, p*) gives an admissible pair with q >= 2.
  for (int n = 3; n <= 8; ++n)
    for (int num = 1; num <= 60; ++num)
      for (int den : {1, 2, 3, 7}) {
        const Rational p(num, den);
        const auto c = check_exponents(n, p, 1);
        if (c.p_star && p >= *c.p_star) continue;
        const auto [qq, rr] = pair_from_p(p, n);
        CHECK(4 * qq.reciprocal() + n * rr.reciprocal() == Rational(n, 2));
      }
}

TEST_CASE("exponent parsing and rational conversion") {
  CHECK(to_rational(1.5) == Rational(3, 2));
  CHECK(to_rational(1.0 / 3.0) == Rational(1, 3));
  CHECK(to_rational(-2.25) == Rational(-9, 4));
  CHECK(parse_exponent("inf").infinite);
  CHECK(parse_exponent("8/3") == Exponent::of(Rational(8, 3)));
  CHECK(parse_exponent("2.5") == Exponent::of(Rational(5, 2)));
  CHECK(parse_exponent("12").str() == "12");
  CHECK(parse_exponent("48/5").str() == "48/5");
  CHECK_THROWS_AS(parse_exponent("two"), ConfigError);
  CHECK_THROWS_AS(parse_exponent("3/0"), ConfigError);
}

TEST_CASE("decay series") {
  Grid g({2, 64, 40.0});
  const auto sys = SystemParams::uniform(1, 2.0, 1, 0.0);
  const auto s0 = packet(g, sys, 1.0, 1.5);
  std::vector<FieldState> traj;
  integrate(s0, g, sys, StepPlan::over(1.0, 0.01, 10), [&](const FieldState& s, long) { traj.push_back(s); });
  const auto d = decay_series(traj, g, sys, {4.0, 6.0});
  REQUIRE(d.times.size() == 11);
  for (std::size_t k = 0; k < 2; ++k) {
    for (std::size_t i = 1; i < d.times.size(); ++i) CHECK(d.norms[k][i] < d.norms[k][i - 1]);
    CHECK(d.slope[k] < 0.0);
    // Free run against its own free comparison.
    for (std::size_t i = 0; i < d.times.size(); ++i)
      CHECK(d.norms[k][i] == doctest::Approx(d.free_norms[k][i]).epsilon(1e-12));
  }
  CHECK_THROWS_AS(decay_series(traj, g, sys, {2.0}), ConfigError);
  CHECK_THROWS_AS(decay_series(traj, g, sys, {INFINITY}), ConfigError);

  std::vector<FieldState> zero{FieldState::zeros(g, 1, 0.0), FieldState::zeros(g, 1, 1.0)};
  const auto z = decay_series(zero, g, sys, {4.0});
  for (double v : z.norms[0]) CHECK(v == 0.0);
  CHECK(z.slope[0] == 0.0);

  CHECK(loglog_slope({1, 2, 4}, {1, 0.25, 0.0625}) == doctest::Approx(-2.0));
  CHECK(loglog_slope({1}, {1}) == 0.0);
}

TEST_CASE("cube mass and localized Gagliardo-Nirenberg ratio") {
  Grid g({2, 32, 8.0});  // h = 1/4, unit cube is 4x4 cells
  auto flat = FieldState::zeros(g, 1);
  flat.u[0].assign(g.size(), Complex(0.0, 2.0));
  CHECK(sup_cube_mass(flat, g, 1.0) == doctest::Approx(4.0).epsilon(1e-14));
  CHECK(sup_cube_mass(flat, g, 2.0) == doctest::Approx(16.0).epsilon(1e-14));
  CHECK_THROWS_AS(sup_cube_mass(flat, g, 9.0), ConfigError);
  CHECK_THROWS_AS(gn_localized_ratio(flat, g, 9.0), ConfigError);

  // A single cell carries its mass into every window that covers it.
  auto spike = FieldState::zeros(g, 1);
  spike.u[0][g.flatten({0, 31, 0})] = 1.0;
  CHECK(sup_cube_mass(spike, g) == doctest::Approx(g.cell_volume()));

  CHECK(gn_localized_ratio(FieldState::zeros(g, 1), g) == 0.0);

  Grid big({2, 64, 24.0});
  const auto sys = SystemParams::uniform(1, 1.0, 0, 1.0);
  const auto s = packet(big, sys, 1.0, 1.3, 0.7);
  const double base = gn_localized_ratio(s, big);
  CHECK(base > 0.0);
  CHECK(gn_localized_ratio(roll(s, big, 7), big) == doctest::Approx(base).epsilon(1e-12));
  auto rot = s;
  for (auto& v : rot.u[0]) v *= std::polar(1.0, 2.1);
  CHECK(gn_localized_ratio(rot, big) == doctest::Approx(base).epsilon(1e-12));

  // Rescaled Gaussians: the ratio stays under one common bound.
  double lo = INFINITY, hi = 0.0;
  for (double sigma : {0.6, 0.9, 1.3, 1.8, 2.4}) {
    const double r = gn_localized_ratio(packet(big, sys, 1.0, sigma), big);
    lo = std::min(lo, r);
    hi = std::max(hi, r);
  }
  CHECK(std::isfinite(hi));
  CHECK(hi < 10.0);
  CHECK(lo > 0.0);
}

TEST_CASE("scattering extraction under free flow") {
  Grid g({1, 512, 200.0});
  const auto sys = SystemParams::uniform(2, 5.0, 1, 0.0);
  auto s0 = packet(g, sys, 0.8, 2.5, 0.3);
  const auto cps = evolve_checkpoints(s0, g, sys, {0.5, 1.0, 2.0}, 1e-2);
  const auto rep = extract_scattering_state(cps, g, sys);
  CHECK(rep.times == std::vector<double>{0.5, 1.0, 2.0});
  CHECK(rep.max_cauchy() < 1e-12);
  CHECK(rep.success);
  CHECK(h2_distance(rep.asymptotic_state, s0, g) < 1e-12);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(rep.cauchy[i][i] == 0.0);
    for (std::size_t j = 0; j < 3; ++j) CHECK(rep.cauchy[i][j] == rep.cauchy[j][i]);
    CHECK(h2_norm_total(rep.pullbacks[i], g) == doctest::Approx(h2_norm_total(cps[i], g)).epsilon(1e-12));
  }
  CHECK_FALSE(rep.in_theorem_range);

  std::vector<FieldState> zero;
  for (double t : {1.0, 2.0, 4.0}) zero.push_back(FieldState::zeros(g, 2, t));
  const auto z = extract_scattering_state(zero, g, sys);
  CHECK(z.max_cauchy() == 0.0);
  CHECK(h2_norm_total(z.asymptotic_state, g) == 0.0);

  CHECK_THROWS_AS(extract_scattering_state({cps[0], cps[1]}, g, sys), Error);
}

TEST_CASE("scattering extraction drops contaminated checkpoints") {
  Grid g({1, 1024, 200.0});
  const auto sys = SystemParams::uniform(1, 5.0, 1, 1.0);
  const auto s0 = packet(g, sys, 0.9, 3.0);
  auto cps = evolve_checkpoints(s0, g, sys, {0.5, 1.0, 1.5, 2.0}, 5e-3);
  auto bad = cps.back();
  bad.t = 4.0;
  bad.u[0][0] += 0.5;
  cps.push_back(bad);
  const auto rep = extract_scattering_state(cps, g, sys);
  CHECK(rep.times.size() == 4);
  CHECK(rep.excluded_times == std::vector<double>{4.0});
  REQUIRE(rep.warnings.size() == 1);
  CHECK(rep.warnings[0].find("t = 4") != std::string::npos);
  // Free-group isometry: distance to the free evolution of v(t_last) is the Cauchy entry.
  for (std::size_t i = 0; i < rep.times.size(); ++i)
    CHECK(std::abs(rep.scattering_error[i] - rep.cauchy[i].back()) < 1e-12 + 1e-9 * rep.cauchy[i].back());
  CHECK(rep.scattering_error.back() < 1e-12);

  cps.resize(2);
  cps.push_back(bad);
  CHECK_THROWS_AS(extract_scattering_state(cps, g, sys), Error);
}

TEST_CASE("defocusing packet: Cauchy differences shrink") {
  Grid g({1, 2048, 400.0});
  const auto sys = SystemParams::uniform(1, 5.0, 1, 1.0);
  const auto s0 = packet(g, sys, 1.0, 3.0);
  const auto rep = extract_scattering_state(evolve_checkpoints(s0, g, sys, {0.5, 1.0, 2.0}, 2e-3), g, sys);
  CHECK(rep.consecutive[1] < rep.consecutive[0]);
  CHECK(rep.max_cauchy() > 1e-3);
  CHECK(rep.success);
}

TEST_CASE("wave operator") {
  Grid g({1, 512, 200.0});
  const auto lin = SystemParams::uniform(1, 5.0, 1, 0.0);
  const auto u = packet(g, lin, 0.8, 2.5, 0.2);
  const auto w = wave_operator(u, 3.0, g, lin, 1e-2);
  CHECK(h2_distance(w, u, g) < 1e-12);
  CHECK(w.t == 0.0);
  auto ur = u;
  for (auto& v : ur.u[0]) v *= std::polar(1.0, 0.6);
  const auto wr = wave_operator(ur, 3.0, g, lin, 1e-2);
  double err = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) err = std::max(err, std::abs(wr.u[0][i] - w.u[0][i] * std::polar(1.0, 0.6)));
  CHECK(err < 1e-13);
  const auto trip = wave_operator_round_trip(u, 1.0, g, lin, 1e-2, {1.0, 2.0, 4.0});
  CHECK(trip.discrepancy < 1e-12);

  Grid wide({1, 2048, 400.0});
  const auto sys = SystemParams::uniform(1, 5.0, 1, 1.0);
  const auto v = packet(wide, sys, 0.8, 3.0);
  const auto short_trip = wave_operator_round_trip(v, 1.0, wide, sys, 2e-3, {1.0, 2.0, 4.0});
  const auto long_trip = wave_operator_round_trip(v, 2.0, wide, sys, 2e-3, {2.0, 4.0, 8.0});
  CHECK(h2_distance(short_trip.initial, v, wide) > 1e-2);
  CHECK(long_trip.discrepancy < short_trip.discrepancy);
  CHECK(long_trip.relative_discrepancy == doctest::Approx(long_trip.discrepancy / h2_norm_total(v, wide)));
  CHECK_THROWS_AS(wave_operator(v, -1.0, wide, sys, 1e-2), ConfigError);
}

TEST_CASE("evolve and checkpoints") {
  Grid g({1, 128, 40.0});
  const auto sys = SystemParams::uniform(1, 2.0, 1, 1.0);
  const auto s = packet(g, sys, 0.8, 1.5);
  const auto a = evolve(s, g, sys, 0.3, 1e-2);
  const auto b = integrate(s, g, sys, StepPlan::over(0.3, 1e-2));
  CHECK(h2_distance(a, b, g) < 1e-12);
  CHECK(a.t == doctest::Approx(0.3));
  CHECK(evolve(s, g, sys, 0.0, 1e-2) == s);
  const auto cps = evolve_checkpoints(s, g, sys, {0.1, 0.3}, 1e-2);
  CHECK(h2_distance(cps[1], a, g) < 1e-12);
  CHECK(cps[1].t == 0.3);
  CHECK_THROWS_AS(evolve_checkpoints(s, g, sys, {0.3, 0.1}, 1e-2), ConfigError);
}

TEST_CASE("W^{2,r} norm of a plane wave") {
  Grid g({1, 64, 2 * pi});
  auto s = FieldState::zeros(g, 1);
  const double a = 0.7;
  for (std::size_t i = 0; i < g.size(); ++i) s.u[0][i] = a * std::polar(1.0, 3.0 * g.coordinate(0)[i]);
  for (const auto& r : {Exponent::of(4), Exponent::of(Rational(7, 2)), Exponent::inf()}) {
    const double vol = r.infinite ? 1.0 : std::pow(2 * pi, 1.0 / r.to_double());
    CHECK(w2r_norm(s, g, r) == doctest::Approx((a + 3 * a + 9 * a) * vol).epsilon(1e-12));
  }
}

TEST_CASE("space-time norms") {
  Grid g({1, 256, 80.0});
  const auto sys = SystemParams::uniform(1, 5.0, 1, 0.0);
  const auto [q, r] = pair_from_p(Rational(5), 1);
  CHECK(q == Exponent::of(Rational(48, 5)));
  CHECK(r == Exponent::of(12));
  const auto s0 = packet(g, sys, 1.0, 2.0);

  std::vector<FieldState> zero;
  for (int k = 0; k < 4; ++k) zero.push_back(FieldState::zeros(g, 1, 0.1 * k));
  CHECK(spacetime_norm(zero, g, q, r).total == 0.0);

  auto sample = [&](double every) {
    std::vector<FieldState> traj;
    for (int k = 0; k * every <= 2.0 + 1e-12; ++k) traj.push_back(free_evolve(s0, g, sys, k * every));
    return traj;
  };
  const auto coarse = spacetime_norm(sample(0.1), g, q, r);
  const auto fine = spacetime_norm(sample(0.05), g, q, r);
  CHECK(std::abs(coarse.total - fine.total) < 0.1 * fine.total);
  for (std::size_t i = 1; i < fine.cumulative.size(); ++i) CHECK(fine.cumulative[i] >= fine.cumulative[i - 1]);
  CHECK(fine.cumulative.front() == 0.0);

  const auto sup = spacetime_norm(sample(0.1), g, Exponent::inf(), Exponent::of(2));
  CHECK(sup.total == doctest::Approx(w2r_norm(s0, g, Exponent::of(2))).epsilon(1e-12));

  CHECK_THROWS_AS(spacetime_norm(zero, g, Exponent::of(4), Exponent::of(4)), ConfigError);
  auto uneven = zero;
  uneven[2].t = 0.25;
  CHECK_THROWS_AS(spacetime_norm(uneven, g, q, r), Error);
}
