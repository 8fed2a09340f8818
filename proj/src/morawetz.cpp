#include "q4nl/morawetz.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numbers>
#include <random>

#include <Eigen/Eigenvalues>

#include "q4nl/error.hpp"
#include "q4nl/fft.hpp"
#include "q4nl/functionals.hpp"
#include "q4nl/reduce.hpp"

namespace q4nl {

std::string to_string(WeightKind kind) { return kind == WeightKind::quadratic ? "quadratic" : "radial_eps"; }

WeightKind parse_weight_kind(const std::string& name) {
  if (name == "quadratic") return WeightKind::quadratic;
  if (name == "radial_eps") return WeightKind::radial_eps;
  throw ConfigError("unknown weight kind '" + name + "'", "diagnostics.weight.kind");
}

void validate(const WeightSpec& w, const Grid& grid) {
  if (w.kind == WeightKind::radial_eps && !(w.epsilon > 0.0 && std::isfinite(w.epsilon)))
    throw ConfigError("radial weight needs epsilon > 0", "diagnostics.weight.epsilon_cells");
  if (w.window < 0 || 2 * w.window >= grid.n())
    throw ConfigError("window must lie in [0, n/2)", "diagnostics.weight.window");
}

namespace {

// Linear combination sum_a c_a s^{-a} of powers of s = sqrt(r^2 + eps^2).
class RadialSeries {
 public:
  RadialSeries(int d, double eps, std::map<int, double> terms) : d_(d), eps2_(eps * eps), terms_(std::move(terms)) {}

  RadialSeries laplacian() const {
    std::map<int, double> out;
    for (auto [a, c] : terms_) {
      const double lead = static_cast<double>(a) * (a + 2 - d_);
      const double tail = -static_cast<double>(a) * (a + 2) * eps2_;
      if (lead != 0.0) out[a + 2] += c * lead;
      if (tail != 0.0) out[a + 4] += c * tail;
    }
    return RadialSeries(d_, std::sqrt(eps2_), std::move(out));
  }

  double value(double s) const {
    double v = 0.0;
    for (auto [a, c] : terms_) v += c * std::pow(s, -a);
    return v;
  }
  /// grad = radial_gradient(s) * x
  double radial_gradient(double s) const {
    double v = 0.0;
    for (auto [a, c] : terms_) v += -c * a * std::pow(s, -a - 2);
    return v;
  }
  /// D^2 = iso(s) I + aniso(s) x x^T
  double iso(double s) const { return radial_gradient(s); }
  double aniso(double s) const {
    double v = 0.0;
    for (auto [a, c] : terms_) v += c * a * (a + 2) * std::pow(s, -a - 4);
    return v;
  }

 private:
  int d_;
  double eps2_;
  std::map<int, double> terms_;
};

double taper(const Grid& grid, std::size_t i, int window) {
  if (window == 0) return 1.0;
  const auto idx = grid.unflatten(i);
  double f = 1.0;
  for (int a = 0; a < grid.dim(); ++a) {
    const int c = std::min(idx[static_cast<std::size_t>(a)], grid.n() - 1 - idx[static_cast<std::size_t>(a)]);
    if (c < window) {
      const double s = std::sin(0.5 * std::numbers::pi * (c + 1) / (window + 1));
      f *= s * s;
    }
  }
  return f;
}

double l2_dot_sum(const std::vector<RealField>& f, std::size_t i) {
  double s = 0.0;
  for (const auto& c : f) s += c[i] * c[i];
  return s;
}

// Per-axis field of g(offset * h) for offsets in [-n/2, n/2), laid out for DFT convolution.
template <class Fn>
RealField offset_kernel(const Grid& grid, Fn&& g) {
  RealField k(grid.size());
  const int n = grid.n();
  const double h = grid.spacing();
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto idx = grid.unflatten(i);
    std::array<double, 3> z{};
    for (int a = 0; a < grid.dim(); ++a) {
      const int m = idx[static_cast<std::size_t>(a)];
      z[static_cast<std::size_t>(a)] = (m < n / 2 ? m : m - n) * h;
    }
    k[i] = g(z);
  }
  return k;
}

// h^d * (kernel * f), kernel given by its transform.
RealField convolve(const Grid& grid, const ComplexField& kernel_hat, const RealField& f) {
  auto spec = fft::forward_real(grid, f);
  for (std::size_t i = 0; i < spec.size(); ++i) spec[i] *= kernel_hat[i];
  fft::inverse(grid, spec);
  RealField out(grid.size());
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = grid.cell_volume() * spec[i].real();
  return out;
}

double weight_epsilon(const WeightSpec& w, const Grid& grid) {
  return w.kind == WeightKind::radial_eps ? w.epsilon : 2.0 * grid.spacing();
}

}  // namespace

WeightFields weight_derivatives(const WeightSpec& w, const Grid& grid) {
  validate(w, grid);
  const int d = grid.dim();
  const auto dd = static_cast<std::size_t>(d);
  const std::size_t m = grid.size();
  WeightFields out;
  out.spec = w;
  out.gradient.assign(dd, RealField(m));
  out.laplacian.assign(m, 0.0);
  out.bilaplacian.assign(m, 0.0);
  out.trilaplacian.assign(m, 0.0);
  out.hessian.assign(dd * dd, RealField(m, 0.0));
  out.hessian_lap.assign(dd * dd, RealField(m, 0.0));

  if (w.kind == WeightKind::quadratic) {
    for (std::size_t i = 0; i < m; ++i) {
      const double f = taper(grid, i, w.window);
      for (std::size_t a = 0; a < dd; ++a) {
        out.gradient[a][i] = f * grid.coordinate(static_cast<int>(a))[i];
        out.hessian[a * dd + a][i] = f;
      }
      out.laplacian[i] = f * d;
    }
    return out;
  }

  const RadialSeries phi(d, w.epsilon, {{-1, 1.0}});
  const auto lap = phi.laplacian();
  const auto bilap = lap.laplacian();
  const auto trilap = bilap.laplacian();
  for (std::size_t i = 0; i < m; ++i) {
    const double f = taper(grid, i, w.window);
    std::array<double, 3> x{};
    double r2 = 0.0;
    for (std::size_t a = 0; a < dd; ++a) {
      x[a] = grid.coordinate(static_cast<int>(a))[i];
      r2 += x[a] * x[a];
    }
    const double s = std::sqrt(r2 + w.epsilon * w.epsilon);
    const double g = phi.radial_gradient(s);
    const double hi = phi.iso(s), ha = phi.aniso(s);
    const double li = lap.iso(s), la = lap.aniso(s);
    for (std::size_t a = 0; a < dd; ++a) {
      out.gradient[a][i] = f * g * x[a];
      for (std::size_t b = 0; b < dd; ++b) {
        const double delta = a == b ? 1.0 : 0.0;
        out.hessian[a * dd + b][i] = f * (hi * delta + ha * x[a] * x[b]);
        out.hessian_lap[a * dd + b][i] = f * (li * delta + la * x[a] * x[b]);
      }
    }
    out.laplacian[i] = f * lap.value(s);
    out.bilaplacian[i] = f * bilap.value(s);
    out.trilaplacian[i] = f * trilap.value(s);
  }
  return out;
}

double action_M(const FieldState& state, const Grid& grid, const WeightFields& w) {
  double total = 0.0;
  for (int mu = 0; mu < state.components(); ++mu) {
    const auto dens = densities(state, grid, mu);
    total += pairwise_sum(grid.size(), [&](std::size_t i) {
      double v = 0.0;
      for (std::size_t a = 0; a < dens.momentum.size(); ++a) v += dens.momentum[a][i] * w.gradient[a][i];
      return v;
    });
  }
  return 2.0 * grid.cell_volume() * total;
}

double action_M(const FieldState& state, const Grid& grid, const SystemParams&, const WeightSpec& w) {
  return action_M(state, grid, weight_derivatives(w, grid));
}

std::array<double, 4> morawetz_rhs(const FieldState& state, const Grid& grid, const SystemParams& sys,
                                   const WeightFields& w) {
  check_shape(state, grid, sys.components);
  const auto dd = static_cast<std::size_t>(grid.dim());
  const double kappa = sys.kappa;
  std::array<double, 4> g{};
  for (const auto& f : state.u) {
    const auto spec = fft::forward_copy(grid, f);
    const auto grad = spectral::gradient(grid, spec);
    const auto hess = spectral::hessian(grid, spec);
    g[0] += pairwise_sum(grid.size(), [&](std::size_t i) {
      double grad2 = 0.0;
      for (std::size_t a = 0; a < dd; ++a) grad2 += std::norm(grad[a][i]);
      return std::norm(f[i]) * (-w.trilaplacian[i] + kappa * w.bilaplacian[i]) + 2.0 * w.bilaplacian[i] * grad2;
    });
    g[1] += pairwise_sum(grid.size(), [&](std::size_t i) {
      double v = 0.0;
      for (std::size_t a = 0; a < dd; ++a)
        for (std::size_t b = 0; b < dd; ++b)
          v += (w.hessian_lap[a * dd + b][i] - kappa * w.hessian[a * dd + b][i]) *
               (grad[a][i] * std::conj(grad[b][i])).real();
      return v;
    });
    g[2] += pairwise_sum(grid.size(), [&](std::size_t i) {
      double v = 0.0;
      for (std::size_t a = 0; a < dd; ++a)
        for (std::size_t j = 0; j < dd; ++j)
          for (std::size_t k = 0; k < dd; ++k)
            v += (hess[a * dd + j][i] * w.hessian[j * dd + k][i] * std::conj(hess[k * dd + a][i])).real();
      return v;
    });
  }
  const double h = grid.cell_volume();
  g[0] *= h;
  g[1] *= 4.0 * h;
  g[2] *= -8.0 * h;
  const auto gamma = sys.gamma();
  if (!gamma.is_zero()) {
    g[3] = -(2.0 * sys.p / (sys.p + 1.0)) * h * pairwise_sum(grid.size(), [&](std::size_t i) {
             return coupled_power_density(state, gamma, sys.p, i) * w.laplacian[i];
           });
  }
  return g;
}

std::array<double, 4> morawetz_rhs(const FieldState& state, const Grid& grid, const SystemParams& sys,
                                   const WeightSpec& w) {
  return morawetz_rhs(state, grid, sys, weight_derivatives(w, grid));
}

std::vector<MorawetzReport> verify_identity(const std::vector<FieldState>& samples, const Grid& grid,
                                            const SystemParams& sys, const WeightSpec& w) {
  if (samples.size() < 3) throw Error("identity check needs at least 3 samples");
  const double dt = samples[1].t - samples[0].t;
  if (dt == 0.0) throw Error("samples must have distinct times");
  for (std::size_t i = 1; i < samples.size(); ++i) {
    const double step = samples[i].t - samples[i - 1].t;
    if (std::abs(step - dt) > 1e-9 * std::abs(dt)) throw Error("samples are not equally spaced in time");
  }
  const auto fields = weight_derivatives(w, grid);
  std::vector<double> action(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) action[i] = action_M(samples[i], grid, fields);

  std::vector<MorawetzReport> out;
  for (std::size_t i = 1; i + 1 < samples.size(); ++i) {
    MorawetzReport r;
    r.t = samples[i].t;
    r.action = action[i];
    r.rhs_terms = morawetz_rhs(samples[i], grid, sys, fields);
    r.fd_derivative = (action[i + 1] - action[i - 1]) / (samples[i + 1].t - samples[i - 1].t);
    r.residual = r.fd_derivative - r.rhs_total();
    out.push_back(r);
  }
  return out;
}

double max_abs_residual(const std::vector<MorawetzReport>& reports) {
  double m = 0.0;
  for (const auto& r : reports) m = std::max(m, std::abs(r.residual));
  return m;
}

WeightConditionReport weight_condition_check(const WeightSpec& w, const Grid& grid, int trials, std::uint64_t seed) {
  if (trials < 1) throw ConfigError("trials must be positive");
  const auto fields = weight_derivatives(w, grid);
  const int d = grid.dim();
  const auto dd = static_cast<std::size_t>(d);
  WeightConditionReport rep;
  rep.trials = trials;
  rep.radial = w.kind == WeightKind::radial_eps;

  rep.min_hessian_eigenvalue = std::numeric_limits<double>::infinity();
  rep.min_laplacian = std::numeric_limits<double>::infinity();
  Eigen::MatrixXd hm(d, d);
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    for (std::size_t a = 0; a < dd; ++a)
      for (std::size_t b = 0; b < dd; ++b) hm(static_cast<long>(a), static_cast<long>(b)) = fields.hessian[a * dd + b][i];
    solver.compute(hm, Eigen::EigenvaluesOnly);
    rep.min_hessian_eigenvalue = std::min(rep.min_hessian_eigenvalue, solver.eigenvalues().minCoeff());
    rep.min_laplacian = std::min(rep.min_laplacian, fields.laplacian[i]);
  }
  const bool convex = rep.min_hessian_eigenvalue >= -1e-12 && rep.min_laplacian > 0.0;
  if (!rep.radial) {
    rep.passed = convex;
    return rep;
  }

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal;
  const double eps2 = w.epsilon * w.epsilon;

  // Pointwise gradient form at random interior points.
  std::vector<std::size_t> interior;
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (taper(grid, i, w.window) == 1.0) interior.push_back(i);
  std::uniform_int_distribution<std::size_t> pick(0, interior.size() - 1);
  rep.gradient_min_slack = std::numeric_limits<double>::infinity();
  for (int trial = 0; trial < trials; ++trial) {
    const std::size_t i = interior[pick(rng)];
    std::array<Complex, 3> g{};
    std::array<double, 3> x{};
    double r2 = 0.0, g2 = 0.0;
    Complex xg{};
    for (std::size_t a = 0; a < dd; ++a) {
      g[a] = Complex(normal(rng), normal(rng));
      x[a] = grid.coordinate(static_cast<int>(a))[i];
      r2 += x[a] * x[a];
      g2 += std::norm(g[a]);
      xg += x[a] * g[a];
    }
    const double gr2 = r2 > 0.0 ? std::norm(xg) / r2 : 0.0;
    const double gp2 = std::max(0.0, g2 - gr2);
    double lhs = 0.0;
    for (std::size_t a = 0; a < dd; ++a)
      for (std::size_t b = 0; b < dd; ++b) lhs += fields.hessian_lap[a * dd + b][i] * (g[a] * std::conj(g[b])).real();
    const double s2 = r2 + eps2;
    const double s = std::sqrt(s2);
    const double s3 = s2 * s, s5 = s3 * s2;
    const double target = -(d - 1) / s3 * (gp2 - 2.0 * gr2);
    const double tol = 3.0 * eps2 / s5 * std::max(0.0, 5.0 * r2 / s2 - d) * gr2;
    const double scale = std::max(d - 1, 1) * g2 / s3;
    rep.gradient_min_slack = std::min(rep.gradient_min_slack, (target - lhs + tol) / scale);
    rep.gradient_max_tolerance = std::max(rep.gradient_max_tolerance, tol / scale);
  }

  // Integrated Hessian form on random smooth localized fields.
  const int fields_to_test = std::min(trials, 4);
  rep.hessian_min_slack = std::numeric_limits<double>::infinity();
  const auto& k2 = grid.wavenumber_squared();
  const double kw = 0.25 * std::numbers::pi / grid.spacing();
  const double window = grid.length() / 10.0;
  for (int trial = 0; trial < fields_to_test; ++trial) {
    ComplexField u(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i)
      u[i] = Complex(normal(rng), normal(rng)) * std::exp(-k2[i] / (2.0 * kw * kw));
    fft::inverse(grid, u);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double r2 = 0.0;
      for (int a = 0; a < d; ++a) r2 += grid.coordinate(a)[i] * grid.coordinate(a)[i];
      u[i] *= std::exp(-r2 / (2.0 * window * window));
    }
    const auto spec = fft::forward_copy(grid, u);
    const auto grad = spectral::gradient(grid, spec);
    const auto hess = spectral::hessian(grid, spec);
    const double lhs = pairwise_sum(grid.size(), [&](std::size_t i) {
      double v = 0.0;
      for (std::size_t a = 0; a < dd; ++a)
        for (std::size_t j = 0; j < dd; ++j)
          for (std::size_t k = 0; k < dd; ++k)
            v += (hess[a * dd + j][i] * fields.hessian[j * dd + k][i] * std::conj(hess[k * dd + a][i])).real();
      return v;
    });
    const double rhs = (d - 1) * pairwise_sum(grid.size(), [&](std::size_t i) {
                         double r2 = 0.0, g2 = 0.0;
                         Complex xg{};
                         for (std::size_t a = 0; a < dd; ++a) {
                           const double x = grid.coordinate(static_cast<int>(a))[i];
                           r2 += x * x;
                           g2 += std::norm(grad[a][i]);
                           xg += x * grad[a][i];
                         }
                         const double perp = r2 > 0.0 ? std::max(0.0, g2 - std::norm(xg) / r2) : g2;
                         const double s = std::sqrt(r2 + eps2);
                         return perp / (s * s * s);
                       });
    const double denom = lhs + rhs;
    rep.hessian_min_slack = std::min(rep.hessian_min_slack, denom > 0.0 ? (lhs - rhs) / denom : 0.0);
  }
  rep.passed = convex && rep.gradient_min_slack >= -kWeightSlackTolerance && rep.hessian_min_slack >= -kWeightSlackTolerance;
  return rep;
}

double interaction_action(const FieldState& state, const Grid& grid, const SystemParams& sys, const WeightSpec& w) {
  check_shape(state, grid, sys.components);
  validate(w, grid);
  const auto dd = static_cast<std::size_t>(grid.dim());
  std::vector<RealField> current(dd, RealField(grid.size(), 0.0));
  RealField total_mass(grid.size(), 0.0);
  for (int mu = 0; mu < state.components(); ++mu) {
    const auto dens = densities(state, grid, mu);
    for (std::size_t i = 0; i < grid.size(); ++i) {
      total_mass[i] += dens.mass[i];
      for (std::size_t a = 0; a < dd; ++a) current[a][i] += dens.momentum[a][i];
    }
  }
  const double eps2 = w.kind == WeightKind::radial_eps ? w.epsilon * w.epsilon : 0.0;
  const bool quadratic = w.kind == WeightKind::quadratic;
  double total = 0.0;
  for (std::size_t a = 0; a < dd; ++a) {
    const auto kernel = offset_kernel(grid, [&](const std::array<double, 3>& z) {
      if (quadratic) return z[a];
      const double s = std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2] + eps2);
      return z[a] / s;
    });
    const auto conv = convolve(grid, fft::forward_real(grid, kernel), total_mass);
    total += pairwise_sum(grid.size(), [&](std::size_t i) { return current[a][i] * conv[i]; });
  }
  return 2.0 * grid.cell_volume() * total;
}

NonlinearMorawetz::NonlinearMorawetz(const Grid& grid, const SystemParams& sys, const WeightSpec& w)
    : grid_(grid), sys_(sys), w_(w) {
  validate(w, grid);
  const double eps = weight_epsilon(w, grid);
  const int d = grid.dim();
  // Transform of (r^2 + eps^2)^{-3/2} on R^d, times |k|^2.
  const double s = 1.5;
  const double nu = s - 0.5 * d;
  const double pref = 2.0 * std::pow(std::numbers::pi, 0.5 * d) / std::tgamma(s);
  const auto& k2 = grid.wavenumber_squared();
  gradient_symbol_.assign(grid.size(), 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (k2[i] == 0.0) continue;
    const double k = std::sqrt(k2[i]);
    gradient_symbol_[i] = k2[i] * pref * std::pow(k / (2.0 * eps), nu) * std::cyl_bessel_k(std::abs(nu), eps * k);
  }
  const auto coulomb = offset_kernel(grid, [&](const std::array<double, 3>& z) {
    return 1.0 / std::sqrt(z[0] * z[0] + z[1] * z[1] + z[2] * z[2] + eps * eps);
  });
  coulomb_hat_ = fft::forward_real(grid, coulomb);
}

NonlinearMorawetz::Values NonlinearMorawetz::integrands(const FieldState& state) const {
  const double h = grid_.cell_volume();
  const double wspec = grid_.spectral_weight();
  const auto gamma = sys_.gamma();
  Values v;
  RealField zeta(grid_.size(), 0.0);
  for (int mu = 0; mu < state.components(); ++mu) {
    const auto& f = state.u[static_cast<std::size_t>(mu)];
    RealField m(grid_.size());
    for (std::size_t i = 0; i < m.size(); ++i) {
      m[i] = std::norm(f[i]);
      zeta[i] += m[i];
    }
    const auto mhat = fft::forward_real(grid_, m);
    v.gradient_kernel +=
        wspec * pairwise_sum(mhat.size(), [&](std::size_t i) { return gradient_symbol_[i] * std::norm(mhat[i]); });
    const double g = gamma(mu, mu);
    if (g != 0.0) {
      const double p = sys_.p;
      v.self_power += g * h * pairwise_sum(m.size(), [&](std::size_t i) { return std::pow(m[i], p + 2.0); });
      const auto conv = convolve(grid_, coulomb_hat_, m);
      v.potential_kernel +=
          g * h * pairwise_sum(m.size(), [&](std::size_t i) { return std::pow(m[i], p + 1.0) * std::max(conv[i], 0.0); });
    }
  }
  v.mass_density_sq = h * pairwise_sum(zeta.size(), [&](std::size_t i) { return zeta[i] * zeta[i]; });
  const auto grad = spectral::gradient_real(grid_, zeta);
  v.mass_gradient_sq = h * pairwise_sum(zeta.size(), [&](std::size_t i) { return l2_dot_sum(grad, i); });
  return v;
}

void NonlinearMorawetz::add(const FieldState& state) {
  check_shape(state, grid_, sys_.components);
  const Values now = integrands(state);
  Sample s;
  s.t = state.t;
  s.interaction_action = w_.kind == WeightKind::radial_eps ? interaction_action(state, grid_, sys_, w_) : 0.0;
  if (samples_.empty()) {
    for (double hn : sobolev_h2_norm(state, grid_)) h2_fourth_ += hn * hn * hn * hn;
  } else {
    const auto& prev = samples_.back();
    const double half = 0.5 * std::abs(state.t - prev.t);
    s.cumulative = prev.cumulative;
    s.cumulative.mass_density_sq += half * (last_.mass_density_sq + now.mass_density_sq);
    s.cumulative.mass_gradient_sq += half * (last_.mass_gradient_sq + now.mass_gradient_sq);
    s.cumulative.self_power += half * (last_.self_power + now.self_power);
    s.cumulative.gradient_kernel += half * (last_.gradient_kernel + now.gradient_kernel);
    s.cumulative.potential_kernel += half * (last_.potential_kernel + now.potential_kernel);
  }
  sup_action_ = std::max(sup_action_, std::abs(s.interaction_action));
  last_ = now;
  samples_.push_back(s);
}

double NonlinearMorawetz::fitted_constant() const {
  return h2_fourth_ > 0.0 ? totals().total() / h2_fourth_ : 0.0;
}

NonlinearMorawetz nonlinear_morawetz_integrals(const std::vector<FieldState>& trajectory, const Grid& grid,
                                               const SystemParams& sys, const WeightSpec& w) {
  NonlinearMorawetz acc(grid, sys, w);
  for (const auto& s : trajectory) acc.add(s);
  return acc;
}

double correlation_norm(const FieldState& state, const Grid& grid, double s) {
  const auto& k2 = grid.wavenumber_squared();
  double total = 0.0;
  for (const auto& f : state.u) {
    RealField m(grid.size());
    for (std::size_t i = 0; i < m.size(); ++i) m[i] = std::norm(f[i]);
    const auto mhat = fft::forward_real(grid, m);
    total += pairwise_sum(mhat.size(), [&](std::size_t i) {
      const double mult = s == 0.0 ? 1.0 : (k2[i] == 0.0 ? 0.0 : std::pow(k2[i], 2.0 * s));
      return mult * std::norm(mhat[i]);
    });
  }
  return grid.spectral_weight() * total;
}

}  // namespace q4nl
