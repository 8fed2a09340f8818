#pragma once

#include <functional>

#include "q4nl/field.hpp"
#include "q4nl/grid.hpp"
#include "q4nl/system.hpp"

namespace q4nl {

/// sigma(k) = |k|^4 + kappa |k|^2 on every grid point.
class MultiplierTable {
 public:
  MultiplierTable(const Grid& grid, int kappa);
  const RealField& symbol() const noexcept { return sigma_; }
  double operator[](std::size_t i) const { return sigma_[i]; }

 private:
  RealField sigma_;
};

/// u_hat <- exp(i t sigma) u_hat for every component.
FieldState free_evolve(const FieldState& state, const Grid& grid, const SystemParams& sys, double t);

/// Exact flow of the nonlinear part over time tau: u_mu <- exp(i tau Phi_mu) u_mu,
/// Phi_mu = sum_nu gamma_{mu nu} |u_nu|^{p+1} |u_mu|^{p-1}.
FieldState nonlinear_phase_step(const FieldState& state, const Grid& grid, const SystemParams& sys, double tau);

/// N(dt/2) F(dt) N(dt/2). Negative dt runs backward.
FieldState strang_step(const FieldState& state, const Grid& grid, const SystemParams& sys, double dt);

struct StepPlan {
  double dt = 1e-3;
  long steps = 0;
  int direction = 1;
  long record_every = 1;

  /// Plan covering |horizon| with steps = round(|horizon| / dt).
  static StepPlan over(double horizon, double dt, long record_every = 1);
};

void validate(const StepPlan& plan);

/// Called with the state after `step` steps (step 0 is the input).
using Observer = std::function<void(const FieldState& state, long step)>;

/// Applies plan.steps Strang steps of size direction * dt. The observer sees
/// every step that is a multiple of record_every. Throws BlowUpError on NaN/Inf.
FieldState integrate(FieldState state, const Grid& grid, const SystemParams& sys, const StepPlan& plan,
                     const Observer& observer = {});

}  // namespace q4nl
