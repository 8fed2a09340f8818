#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include <boost/rational.hpp>

#include "q4nl/field.hpp"
#include "q4nl/grid.hpp"
#include "q4nl/system.hpp"

namespace q4nl {

using Rational = boost::rational<std::int64_t>;

/// Closest fraction with denominator <= max_den (continued fractions).
Rational to_rational(double x, std::int64_t max_den = 1000000);

/// A Lebesgue exponent in [1, inf].
struct Exponent {
  Rational value{0};
  bool infinite = false;

  static Exponent inf() { return {Rational(0), true}; }
  static Exponent of(Rational v) { return {v, false}; }

  /// 1 / exponent, with 1 / inf = 0.
  Rational reciprocal() const { return infinite ? Rational(0) : Rational(1) / value; }
  double to_double() const;
  std::string str() const;

  bool operator==(const Exponent&) const = default;
};

Exponent parse_exponent(const std::string& text);

struct ExponentCheck {
  int d = 0;
  Rational p{0};
  int components = 1;
  std::optional<Rational> p_star;  // empty: +inf
  bool decay_ok = false;
  bool scattering_ok = false;
  bool in_theorem_range = false;  // 3 <= d <= 8
};

/// p* = inf for d <= 4, 4 / (d - 4) for d >= 5. decay_ok: 0 < p < p*, with p >= 1
/// when N > 1. scattering_ok: 1 <= p < p* and p d > 4. Never throws.
ExponentCheck check_exponents(int d, Rational p, int components);
ExponentCheck check_exponents(int d, double p, int components);

/// 4/q + n/r = n/2 with q, r >= 2, excluding (q, r, n) = (2, inf, 4).
bool admissible_pair(const Exponent& q, const Exponent& r, int n);

/// (q, r) = (8(p+1)/(n p), 2p + 2). Throws Error unless p > 0 and the pair is admissible.
std::pair<Exponent, Exponent> pair_from_p(Rational p, int n);

struct DecaySeries {
  std::vector<double> q_list;
  std::vector<double> times;
  std::vector<std::vector<double>> norms;       // [q][sample]
  std::vector<std::vector<double>> free_norms;  // same for the free flow of the first sample
  std::vector<double> slope;                    // log-log tail slope per q
  std::vector<double> free_slope;
};

/// L^q norms (l2 over components) along a trajectory and along the free
/// evolution of its first sample. Each q must lie in (2, inf); otherwise
/// ConfigError. Slopes are least-squares fits of log norm against log t over
/// the samples with t >= (1 - tail) t_last and t > 0.
DecaySeries decay_series(const std::vector<FieldState>& trajectory, const Grid& grid, const SystemParams& sys,
                         const std::vector<double>& q_list, double tail = 0.5);

/// Least-squares slope of log y against log x over points with x, y > 0; 0 if fewer than two.
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Largest mass sum_mu int_Q |u_mu|^2 over axis-aligned cubes Q of the given side
/// (rounded to whole cells), positioned on grid points, wrapping periodically.
double sup_cube_mass(const FieldState& state, const Grid& grid, double side = 1.0);

/// int |u|^{(2d+4)/d} / [ (sup_Q int_Q |u|^2)^{4/d} ||u||_{H^2}^2 ], |u| the pointwise
/// l2 modulus over components. 0 for the zero field. Throws ConfigError if side > L.
double gn_localized_ratio(const FieldState& state, const Grid& grid, double side = 1.0);

inline constexpr double kCauchyFloor = 1e-12;

struct ScatterReport {
  std::vector<double> times;
  std::vector<FieldState> pullbacks;           // v(t_i) = e^{-i t_i (Delta^2 - kappa Delta)} u(t_i)
  std::vector<std::vector<double>> cauchy;     // ||v(t_i) - v(t_j)||_{H^2}
  std::vector<double> consecutive;             // cauchy[i+1][i]
  std::vector<double> scattering_error;        // ||u(t_i) - free(t_i) u0+||_{H^2}
  std::vector<double> excluded_times;
  std::vector<std::string> warnings;
  FieldState asymptotic_state;                 // u0+ = v(t_last), at t = 0
  bool success = false;
  bool in_theorem_range = false;

  double max_cauchy() const;
};

/// Pullback of each checkpoint by the free group. Checkpoints whose boundary
/// fraction exceeds kBoundaryThreshold are dropped with a warning; fewer than
/// three clean ones is an Error. success: consecutive differences strictly
/// decreasing, or every Cauchy entry below kCauchyFloor.
ScatterReport extract_scattering_state(const std::vector<FieldState>& checkpoints, const Grid& grid,
                                       const SystemParams& sys);

/// Solution of the full equation over `horizon` (sign gives direction). With
/// vanishing coupling this is the free group applied once; otherwise
/// round(|horizon| / dt) equal Strang steps.
FieldState evolve(const FieldState& state, const Grid& grid, const SystemParams& sys, double horizon, double dt);

/// States at the requested increasing times, starting from `state`.
std::vector<FieldState> evolve_checkpoints(const FieldState& state, const Grid& grid, const SystemParams& sys,
                                           const std::vector<double>& times, double dt);

/// Initial datum whose solution approaches the free evolution of u0plus:
/// free(T) u0plus, then the full equation backward from T to 0.
FieldState wave_operator(const FieldState& u0plus, double T, const Grid& grid, const SystemParams& sys, double dt);

struct WaveOperatorReport {
  FieldState initial;
  ScatterReport reextracted;
  double discrepancy = 0.0;           // ||u0+ re-extracted - u0+||_{H^2}
  double relative_discrepancy = 0.0;  // divided by ||u0+||_{H^2}, 0 if that vanishes
};

/// wave_operator followed by a forward run and re-extraction at checkpoint_times.
WaveOperatorReport wave_operator_round_trip(const FieldState& u0plus, double T, const Grid& grid,
                                            const SystemParams& sys, double dt,
                                            const std::vector<double>& checkpoint_times);

struct SpacetimeNorm {
  double total = 0.0;
  std::vector<double> times;
  std::vector<double> cumulative;  // norm over [t_0, t_i]
};

/// W^{2,r} norm: ||u||_r + || |grad u| ||_r + || |D^2 u| ||_r per component
/// (spectral derivatives, Euclidean/Frobenius moduli), l2 over components.
double w2r_norm(const FieldState& state, const Grid& grid, const Exponent& r);

/// (int ||u(t)||_{W^{2,r}}^q dt)^{1/q} by the trapezoid rule (max over samples for
/// q = inf). Samples must be uniformly spaced; (q, r) must be admissible in d.
SpacetimeNorm spacetime_norm(const std::vector<FieldState>& trajectory, const Grid& grid, const Exponent& q,
                             const Exponent& r);

}  // namespace q4nl
