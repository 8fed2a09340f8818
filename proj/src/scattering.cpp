#include "q4nl/scattering.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>

#include "q4nl/error.hpp"
#include "q4nl/fft.hpp"
#include "q4nl/functionals.hpp"
#include "q4nl/propagator.hpp"
#include "q4nl/reduce.hpp"

namespace q4nl {

Rational to_rational(double x, std::int64_t max_den) {
  if (!std::isfinite(x)) throw Error("cannot convert a non-finite value to a fraction");
  const bool neg = x < 0.0;
  double r = std::abs(x);
  std::int64_t h0 = 0, h1 = 1, k0 = 1, k1 = 0;
  for (int iter = 0; iter < 64; ++iter) {
    const double a = std::floor(r);
    if (a > 9.2e18) break;
    const auto ai = static_cast<std::int64_t>(a);
    const std::int64_t k2 = ai * k1 + k0;
    if (k2 > max_den) break;
    const std::int64_t h2 = ai * h1 + h0;
    h0 = h1, h1 = h2, k0 = k1, k1 = k2;
    const double frac = r - a;
    if (frac < 1e-12) break;
    r = 1.0 / frac;
  }
  if (k1 == 0) throw Error("value too large for a fraction");
  return Rational(neg ? -h1 : h1, k1);
}

double Exponent::to_double() const {
  return infinite ? std::numeric_limits<double>::infinity() : boost::rational_cast<double>(value);
}

std::string Exponent::str() const {
  if (infinite) return "inf";
  if (value.denominator() == 1) return std::to_string(value.numerator());
  return std::to_string(value.numerator()) + "/" + std::to_string(value.denominator());
}

Exponent parse_exponent(const std::string& text) {
  if (text == "inf" || text == "infinity" || text == "Inf") return Exponent::inf();
  try {
    if (const auto slash = text.find('/'); slash != std::string::npos) {
      std::size_t used = 0;
      const auto num = std::stoll(text.substr(0, slash), &used);
      const auto den_text = text.substr(slash + 1);
      std::size_t used_den = 0;
      const auto den = std::stoll(den_text, &used_den);
      if (used != slash || used_den != den_text.size() || den == 0) throw std::invalid_argument(text);
      return Exponent::of(Rational(num, den));
    }
    std::size_t used = 0;
    const double v = std::stod(text, &used);
    if (used != text.size()) throw std::invalid_argument(text);
    if (std::isinf(v)) return Exponent::inf();
    return Exponent::of(to_rational(v));
  } catch (const std::logic_error&) {
    throw ConfigError("not an exponent: '" + text + "'");
  }
}

ExponentCheck check_exponents(int d, Rational p, int components) {
  ExponentCheck c;
  c.d = d;
  c.p = p;
  c.components = components;
  if (d >= 5) c.p_star = Rational(4, d - 4);
  const bool below = !c.p_star || p < *c.p_star;
  c.decay_ok = p > 0 && below && (components <= 1 || p >= 1);
  c.scattering_ok = p >= 1 && below && p * d > 4;
  c.in_theorem_range = d >= 3 && d <= 8;
  return c;
}

ExponentCheck check_exponents(int d, double p, int components) {
  if (!std::isfinite(p)) {
    ExponentCheck c;
    c.d = d;
    c.components = components;
    c.in_theorem_range = d >= 3 && d <= 8;
    if (d >= 5) c.p_star = Rational(4, d - 4);
    return c;
  }
  return check_exponents(d, to_rational(p), components);
}

bool admissible_pair(const Exponent& q, const Exponent& r, int n) {
  if (n < 1) return false;
  if (!q.infinite && q.value < 2) return false;
  if (!r.infinite && r.value < 2) return false;
  if (!q.infinite && q.value == Rational(2) && r.infinite && n == 4) return false;
  return 4 * q.reciprocal() + n * r.reciprocal() == Rational(n, 2);
}

std::pair<Exponent, Exponent> pair_from_p(Rational p, int n) {
  if (p <= 0 || n < 1) throw Error("pair_from_p needs p > 0 and n >= 1");
  const auto q = Exponent::of(8 * (p + 1) / (n * p));
  const auto r = Exponent::of(2 * p + 2);
  if (!admissible_pair(q, r, n))
    throw Error("pair (" + q.str() + ", " + r.str() + ") is not admissible in dimension " + std::to_string(n));
  return {q, r};
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int m = 0;
  for (std::size_t i = 0; i < std::min(x.size(), y.size()); ++i) {
    if (!(x[i] > 0.0) || !(y[i] > 0.0)) continue;
    const double lx = std::log(x[i]), ly = std::log(y[i]);
    sx += lx, sy += ly, sxx += lx * lx, sxy += lx * ly;
    ++m;
  }
  if (m < 2) return 0.0;
  const double den = m * sxx - sx * sx;
  return den == 0.0 ? 0.0 : (m * sxy - sx * sy) / den;
}

DecaySeries decay_series(const std::vector<FieldState>& trajectory, const Grid& grid, const SystemParams& sys,
                         const std::vector<double>& q_list, double tail) {
  for (double q : q_list)
    if (!(q > 2.0) || !std::isfinite(q))
      throw ConfigError("decay exponents must lie in (2, inf), got " + std::to_string(q), "diagnostics.q_list");
  DecaySeries out;
  out.q_list = q_list;
  out.norms.assign(q_list.size(), {});
  out.free_norms.assign(q_list.size(), {});
  if (trajectory.empty()) {
    out.slope.assign(q_list.size(), 0.0);
    out.free_slope.assign(q_list.size(), 0.0);
    return out;
  }
  const auto& first = trajectory.front();
  for (const auto& s : trajectory) {
    out.times.push_back(s.t);
    const auto f = free_evolve(first, grid, sys, s.t - first.t);
    for (std::size_t k = 0; k < q_list.size(); ++k) {
      out.norms[k].push_back(lq_norm_total(s, grid, q_list[k]));
      out.free_norms[k].push_back(lq_norm_total(f, grid, q_list[k]));
    }
  }
  const double t_last = out.times.back();
  std::vector<double> tt;
  std::vector<std::size_t> keep;
  for (std::size_t i = 0; i < out.times.size(); ++i)
    if (out.times[i] > 0.0 && out.times[i] >= (1.0 - tail) * t_last) keep.push_back(i);
  for (auto i : keep) tt.push_back(out.times[i]);
  for (std::size_t k = 0; k < q_list.size(); ++k) {
    std::vector<double> a, b;
    for (auto i : keep) {
      a.push_back(out.norms[k][i]);
      b.push_back(out.free_norms[k][i]);
    }
    out.slope.push_back(loglog_slope(tt, a));
    out.free_slope.push_back(loglog_slope(tt, b));
  }
  return out;
}

namespace {

// Periodic running sum of width w along one axis, in place.
void box_sum_axis(RealField& f, const Grid& grid, int axis, int w) {
  const auto n = static_cast<std::size_t>(grid.n());
  std::size_t stride = 1;
  for (int a = grid.dim() - 1; a > axis; --a) stride *= n;
  std::vector<double> line(n), out(n);
  for (std::size_t base = 0; base < f.size(); ++base) {
    if ((base / stride) % n != 0) continue;
    for (std::size_t j = 0; j < n; ++j) line[j] = f[base + j * stride];
    double s = 0.0;
    for (int j = 0; j < w; ++j) s += line[static_cast<std::size_t>(j)];
    out[0] = s;
    for (std::size_t j = 1; j < n; ++j) {
      s += line[(j + static_cast<std::size_t>(w) - 1) % n] - line[j - 1];
      out[j] = s;
    }
    for (std::size_t j = 0; j < n; ++j) f[base + j * stride] = out[j];
  }
}

RealField modulus_squared(const FieldState& state, const Grid& grid) {
  RealField rho(grid.size(), 0.0);
  for (const auto& f : state.u)
    for (std::size_t i = 0; i < rho.size(); ++i) rho[i] += std::norm(f[i]);
  return rho;
}

}  // namespace

double sup_cube_mass(const FieldState& state, const Grid& grid, double side) {
  if (!(side > 0.0) || side > grid.length())
    throw ConfigError("cube side must lie in (0, L]", "diagnostics.cube_side");
  const int w = std::clamp(static_cast<int>(std::lround(side / grid.spacing())), 1, grid.n());
  auto rho = modulus_squared(state, grid);
  for (int a = 0; a < grid.dim(); ++a) box_sum_axis(rho, grid, a, w);
  double best = 0.0;
  for (double v : rho) best = std::max(best, v);
  return best * grid.cell_volume();
}

double gn_localized_ratio(const FieldState& state, const Grid& grid, double side) {
  const double cube = sup_cube_mass(state, grid, side);
  if (cube == 0.0) return 0.0;
  const int d = grid.dim();
  const double power = (2.0 * d + 4.0) / d;
  const auto rho = modulus_squared(state, grid);
  const double lhs = grid.cell_volume() * pairwise_sum(rho.size(), [&](std::size_t i) { return std::pow(rho[i], 0.5 * power); });
  const double h2 = h2_norm_total(state, grid);
  return lhs / (std::pow(cube, 4.0 / d) * h2 * h2);
}

double ScatterReport::max_cauchy() const {
  double m = 0.0;
  for (const auto& row : cauchy)
    for (double v : row) m = std::max(m, v);
  return m;
}

ScatterReport extract_scattering_state(const std::vector<FieldState>& checkpoints, const Grid& grid,
                                       const SystemParams& sys) {
  ScatterReport rep;
  rep.in_theorem_range = check_exponents(grid.dim(), sys.p, sys.components).in_theorem_range;
  std::vector<const FieldState*> clean;
  for (const auto& s : checkpoints) {
    check_shape(s, grid, sys.components);
    const double frac = boundary_fraction(s, grid);
    if (frac > kBoundaryThreshold) {
      char buf[160];
      std::snprintf(buf, sizeof buf, "checkpoint t = %g excluded: boundary fraction %.3g exceeds %g", s.t, frac,
                    kBoundaryThreshold);
      rep.warnings.emplace_back(buf);
      rep.excluded_times.push_back(s.t);
      continue;
    }
    clean.push_back(&s);
  }
  if (clean.size() < 3)
    throw Error("scattering extraction needs at least 3 clean checkpoints, got " + std::to_string(clean.size()));
  for (std::size_t i = 1; i < clean.size(); ++i)
    if (!(clean[i]->t > clean[i - 1]->t)) throw Error("checkpoint times must be strictly increasing");

  const std::size_t m = clean.size();
  rep.pullbacks.resize(m);
  for (std::size_t i = 0; i < m; ++i) rep.times.push_back(clean[i]->t);
  parallel_for(m, [&](std::size_t i) {
    rep.pullbacks[i] = free_evolve(*clean[i], grid, sys, -clean[i]->t);
    rep.pullbacks[i].t = 0.0;
  });
  rep.cauchy.assign(m, std::vector<double>(m, 0.0));
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < i; ++j) rep.cauchy[i][j] = rep.cauchy[j][i] = h2_distance(rep.pullbacks[i], rep.pullbacks[j], grid);
  for (std::size_t i = 0; i + 1 < m; ++i) rep.consecutive.push_back(rep.cauchy[i + 1][i]);
  rep.asymptotic_state = rep.pullbacks.back();
  rep.scattering_error.resize(m);
  parallel_for(m, [&](std::size_t i) {
    rep.scattering_error[i] = h2_distance(*clean[i], free_evolve(rep.asymptotic_state, grid, sys, clean[i]->t), grid);
  });

  bool decreasing = true;
  for (std::size_t i = 1; i < rep.consecutive.size(); ++i) decreasing = decreasing && rep.consecutive[i] < rep.consecutive[i - 1];
  rep.success = decreasing || rep.max_cauchy() < kCauchyFloor;
  return rep;
}

FieldState evolve(const FieldState& state, const Grid& grid, const SystemParams& sys, double horizon, double dt) {
  check_shape(state, grid, sys.components);
  if (horizon == 0.0) return state;
  if (sys.gamma().is_zero()) return free_evolve(state, grid, sys, horizon);
  if (!(dt > 0.0)) throw ConfigError("dt must be positive", "time.dt");
  const long steps = std::max(1L, std::lround(std::abs(horizon) / dt));
  StepPlan plan;
  plan.dt = std::abs(horizon) / static_cast<double>(steps);
  plan.steps = steps;
  plan.direction = horizon < 0.0 ? -1 : 1;
  auto out = integrate(state, grid, sys, plan);
  out.t = state.t + horizon;
  return out;
}

std::vector<FieldState> evolve_checkpoints(const FieldState& state, const Grid& grid, const SystemParams& sys,
                                           const std::vector<double>& times, double dt) {
  std::vector<FieldState> out;
  FieldState cur = state;
  for (double t : times) {
    if (t < cur.t) throw ConfigError("checkpoint times must be increasing and not before the start",
                                     "scattering.checkpoint_times");
    cur = evolve(cur, grid, sys, t - cur.t, dt);
    cur.t = t;
    out.push_back(cur);
  }
  return out;
}

FieldState wave_operator(const FieldState& u0plus, double T, const Grid& grid, const SystemParams& sys, double dt) {
  if (!(T >= 0.0)) throw ConfigError("wave operator horizon must be nonnegative", "scattering.horizon");
  auto asym = u0plus;
  asym.t = 0.0;
  auto at_T = free_evolve(asym, grid, sys, T);
  auto out = evolve(at_T, grid, sys, -T, dt);
  out.t = 0.0;
  return out;
}

WaveOperatorReport wave_operator_round_trip(const FieldState& u0plus, double T, const Grid& grid,
                                            const SystemParams& sys, double dt,
                                            const std::vector<double>& checkpoint_times) {
  WaveOperatorReport rep;
  rep.initial = wave_operator(u0plus, T, grid, sys, dt);
  rep.reextracted = extract_scattering_state(evolve_checkpoints(rep.initial, grid, sys, checkpoint_times, dt), grid, sys);
  auto target = u0plus;
  target.t = 0.0;
  rep.discrepancy = h2_distance(rep.reextracted.asymptotic_state, target, grid);
  const double scale = h2_norm_total(target, grid);
  rep.relative_discrepancy = scale > 0.0 ? rep.discrepancy / scale : 0.0;
  return rep;
}

namespace {

double lr_norm(const RealField& g, const Grid& grid, double r) {
  if (std::isinf(r)) {
    double m = 0.0;
    for (double v : g) m = std::max(m, v);
    return m;
  }
  return std::pow(grid.cell_volume() * pairwise_sum(g.size(), [&](std::size_t i) { return std::pow(g[i], r); }), 1.0 / r);
}

}  // namespace

double w2r_norm(const FieldState& state, const Grid& grid, const Exponent& r) {
  const double rr = r.to_double();
  const int d = grid.dim();
  double total = 0.0;
  for (const auto& f : state.u) {
    const auto spec = fft::forward_copy(grid, f);
    const auto grad = spectral::gradient(grid, spec);
    const auto hess = spectral::hessian(grid, spec);
    RealField a(grid.size()), b(grid.size(), 0.0), c(grid.size(), 0.0);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      a[i] = std::abs(f[i]);
      for (int x = 0; x < d; ++x) b[i] += std::norm(grad[static_cast<std::size_t>(x)][i]);
      for (int x = 0; x < d * d; ++x) c[i] += std::norm(hess[static_cast<std::size_t>(x)][i]);
      b[i] = std::sqrt(b[i]);
      c[i] = std::sqrt(c[i]);
    }
    const double w = lr_norm(a, grid, rr) + lr_norm(b, grid, rr) + lr_norm(c, grid, rr);
    total += w * w;
  }
  return std::sqrt(total);
}

SpacetimeNorm spacetime_norm(const std::vector<FieldState>& trajectory, const Grid& grid, const Exponent& q,
                             const Exponent& r) {
  if (!admissible_pair(q, r, grid.dim()))
    throw ConfigError("(" + q.str() + ", " + r.str() + ") is not admissible in dimension " + std::to_string(grid.dim()));
  SpacetimeNorm out;
  if (trajectory.empty()) return out;
  const std::size_t m = trajectory.size();
  const double dt = m > 1 ? trajectory[1].t - trajectory[0].t : 0.0;
  for (std::size_t i = 1; i < m; ++i) {
    const double step = trajectory[i].t - trajectory[i - 1].t;
    if (!(dt > 0.0) || std::abs(step - dt) > 1e-9 * std::abs(dt))
      throw Error("space-time norm needs uniformly spaced, increasing samples");
  }
  std::vector<double> w(m);
  parallel_for(m, [&](std::size_t i) { w[i] = w2r_norm(trajectory[i], grid, r); });
  const double qq = q.to_double();
  double acc = 0.0;
  for (std::size_t i = 0; i < m; ++i) {
    out.times.push_back(trajectory[i].t);
    if (q.infinite) {
      acc = std::max(acc, w[i]);
      out.cumulative.push_back(acc);
    } else {
      if (i > 0) acc += 0.5 * dt * (std::pow(w[i - 1], qq) + std::pow(w[i], qq));
      out.cumulative.push_back(std::pow(acc, 1.0 / qq));
    }
  }
  out.total = out.cumulative.back();
  return out;
}

}  // namespace q4nl
