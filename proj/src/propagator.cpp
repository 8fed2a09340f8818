#include "q4nl/propagator.hpp"

#include <cmath>
#include <string>

#include "q4nl/error.hpp"
#include "q4nl/fft.hpp"
#include "q4nl/reduce.hpp"

namespace q4nl {

MultiplierTable::MultiplierTable(const Grid& grid, int kappa) : sigma_(grid.size()) {
  const auto& k2 = grid.wavenumber_squared();
  for (std::size_t i = 0; i < grid.size(); ++i) sigma_[i] = k2[i] * k2[i] + kappa * k2[i];
}

namespace {

// Phase table exp(i t sigma), rebuilt only when (grid, kappa, t) changes.
class FreeStepper {
 public:
  FreeStepper(const Grid& grid, int kappa) : grid_(grid), table_(grid, kappa) {}

  void apply(FieldState& state, double t) {
    if (t == 0.0) return;
    if (phase_.empty() || t != t_) {
      phase_.resize(grid_.size());
      for (std::size_t i = 0; i < grid_.size(); ++i) phase_[i] = std::polar(1.0, t * table_[i]);
      t_ = t;
    }
    parallel_for(state.u.size(), [&](std::size_t c) {
      auto& f = state.u[c];
      fft::forward(grid_, f);
      for (std::size_t i = 0; i < f.size(); ++i) f[i] *= phase_[i];
      fft::inverse(grid_, f);
    });
  }

 private:
  Grid grid_;
  MultiplierTable table_;
  ComplexField phase_;
  double t_ = 0.0;
};

void apply_nonlinear(FieldState& state, const CouplingMatrix& gamma, double p, double tau) {
  if (tau == 0.0 || state.u.empty() || gamma.is_zero()) return;
  const int n = state.components();
  const std::size_t m = state.u.front().size();
  const double half_cross = 0.5 * (p + 1.0);
  const double half_self = 0.5 * (p - 1.0);
  std::vector<double> mod2(static_cast<std::size_t>(n));
  for (std::size_t i = 0; i < m; ++i) {
    for (int mu = 0; mu < n; ++mu) mod2[static_cast<std::size_t>(mu)] = std::norm(state.u[static_cast<std::size_t>(mu)][i]);
    for (int mu = 0; mu < n; ++mu) {
      const double a2 = mod2[static_cast<std::size_t>(mu)];
      // Diagonal term written as |u|^{2p} so it stays finite at zeros for any p > 0.
      double phi = gamma(mu, mu) * std::pow(a2, p);
      for (int nu = 0; nu < n; ++nu) {
        if (nu == mu || gamma(mu, nu) == 0.0) continue;
        phi += gamma(mu, nu) * std::pow(mod2[static_cast<std::size_t>(nu)], half_cross) * std::pow(a2, half_self);
      }
      if (phi != 0.0) state.u[static_cast<std::size_t>(mu)][i] *= std::polar(1.0, tau * phi);
    }
  }
}

void check_finite(const FieldState& state, long step) {
  if (!state.all_finite())
    throw BlowUpError("non-finite field value after step " + std::to_string(step) + " (t = " + std::to_string(state.t) +
                      ")");
}

}  // namespace

FieldState free_evolve(const FieldState& state, const Grid& grid, const SystemParams& sys, double t) {
  FieldState out = state;
  FreeStepper(grid, sys.kappa).apply(out, t);
  out.t = state.t + t;
  return out;
}

FieldState nonlinear_phase_step(const FieldState& state, const Grid& grid, const SystemParams& sys, double tau) {
  check_shape(state, grid, sys.components);
  FieldState out = state;
  if (!out.u.empty()) apply_nonlinear(out, sys.gamma(), sys.p, tau);
  out.t = state.t + tau;
  return out;
}

FieldState strang_step(const FieldState& state, const Grid& grid, const SystemParams& sys, double dt) {
  StepPlan plan;
  plan.dt = std::abs(dt);
  plan.steps = dt == 0.0 ? 0 : 1;
  plan.direction = dt < 0.0 ? -1 : 1;
  return integrate(state, grid, sys, plan);
}

StepPlan StepPlan::over(double horizon, double dt, long record_every) {
  StepPlan plan;
  plan.dt = dt;
  plan.steps = std::lround(std::abs(horizon) / dt);
  plan.direction = horizon < 0.0 ? -1 : 1;
  plan.record_every = record_every;
  return plan;
}

void validate(const StepPlan& plan) {
  if (!(plan.dt > 0.0) || !std::isfinite(plan.dt)) throw ConfigError("dt must be positive", "time.dt");
  if (plan.steps < 0) throw ConfigError("step count must be nonnegative", "time.t_end");
  if (plan.direction != 1 && plan.direction != -1) throw ConfigError("direction must be +1 or -1");
  if (plan.record_every < 1) throw ConfigError("record_every must be >= 1", "time.record_every");
}

FieldState integrate(FieldState state, const Grid& grid, const SystemParams& sys, const StepPlan& plan,
                     const Observer& observer) {
  validate(plan);
  check_shape(state, grid, sys.components);
  const double dt = plan.direction * plan.dt;
  const double t0 = state.t;
  const auto gamma = sys.gamma();
  FreeStepper free(grid, sys.kappa);
  if (observer) observer(state, 0);
  for (long step = 1; step <= plan.steps; ++step) {
    apply_nonlinear(state, gamma, sys.p, 0.5 * dt);
    free.apply(state, dt);
    apply_nonlinear(state, gamma, sys.p, 0.5 * dt);
    state.t = t0 + static_cast<double>(step) * dt;
    check_finite(state, step);
    if (observer && step % plan.record_every == 0) observer(state, step);
  }
  return state;
}

}  // namespace q4nl
