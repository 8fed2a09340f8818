#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include "q4nl/field.hpp"
#include "q4nl/grid.hpp"
#include "q4nl/system.hpp"

namespace q4nl {

enum class WeightKind { quadratic, radial_eps };

std::string to_string(WeightKind kind);
WeightKind parse_weight_kind(const std::string& name);

/// quadratic: phi = |x|^2 / 2.  radial_eps: phi = sqrt(|x|^2 + eps^2).
struct WeightSpec {
  WeightKind kind = WeightKind::quadratic;
  double epsilon = 0.0;  // physical units
  int window = 0;        // boundary taper width in cells, 0 disables

  static WeightSpec quadratic() { return {}; }
  static WeightSpec radial(double epsilon, int window = 0) { return {WeightKind::radial_eps, epsilon, window}; }

  bool operator==(const WeightSpec&) const = default;
};

void validate(const WeightSpec& w, const Grid& grid);

/// Weight and its derivatives sampled on the grid. Matrices are d*d, entry
/// (a, b) at index a*d + b.
struct WeightFields {
  WeightSpec spec;
  std::vector<RealField> gradient;     // grad phi
  RealField laplacian;                 // Delta phi
  RealField bilaplacian;               // Delta^2 phi
  RealField trilaplacian;              // Delta^3 phi
  std::vector<RealField> hessian;      // D^2 phi
  std::vector<RealField> hessian_lap;  // D^2 Delta phi
};

WeightFields weight_derivatives(const WeightSpec& w, const Grid& grid);

/// M = 2 sum_mu int j_mu . grad phi
double action_M(const FieldState& state, const Grid& grid, const WeightFields& w);
double action_M(const FieldState& state, const Grid& grid, const SystemParams& sys, const WeightSpec& w);

/// The four groups whose sum is dM/dt:
///   [0] sum int m (-Delta^3 phi + kappa Delta^2 phi) + 2 Delta^2 phi |grad u|^2
///   [1] 4 sum int grad u . (D^2 Delta phi - kappa D^2 phi) . grad conj(u)
///   [2] -8 sum int Re sum_{ijk} u_ij phi_jk conj(u_ki)
///   [3] -(2p/(p+1)) sum gamma_{mu nu} int |u_mu|^{p+1} |u_nu|^{p+1} Delta phi
std::array<double, 4> morawetz_rhs(const FieldState& state, const Grid& grid, const SystemParams& sys,
                                   const WeightFields& w);
std::array<double, 4> morawetz_rhs(const FieldState& state, const Grid& grid, const SystemParams& sys,
                                   const WeightSpec& w);

struct MorawetzReport {
  double t = 0.0;
  double action = 0.0;
  std::array<double, 4> rhs_terms{};
  double fd_derivative = 0.0;
  double residual = 0.0;

  double rhs_total() const { return rhs_terms[0] + rhs_terms[1] + rhs_terms[2] + rhs_terms[3]; }
};

/// Centered-difference dM/dt minus the assembled right-hand side at every
/// interior sample. Samples must be equally spaced in time (at least 3).
std::vector<MorawetzReport> verify_identity(const std::vector<FieldState>& samples, const Grid& grid,
                                            const SystemParams& sys, const WeightSpec& w);

double max_abs_residual(const std::vector<MorawetzReport>& reports);

struct WeightConditionReport {
  int trials = 0;
  bool radial = false;
  // Integrated Hessian bound: int Re tr(D^2u D^2phi D^2conj(u)) >= (d-1) int |grad_perp u|^2 / s^3,
  // minimum of (lhs - rhs) / (lhs + rhs) over random fields.
  double hessian_min_slack = 0.0;
  // Pointwise gradient form grad u . D^2 Delta phi . grad conj(u) against
  // -(d-1)/s^3 (|g_perp|^2 - 2 |g_r|^2), minimum of (slack + tolerance) / scale.
  double gradient_min_slack = 0.0;
  double gradient_max_tolerance = 0.0;
  double min_hessian_eigenvalue = 0.0;
  double min_laplacian = 0.0;
  bool passed = false;
};

inline constexpr double kWeightSlackTolerance = 1e-6;

WeightConditionReport weight_condition_check(const WeightSpec& w, const Grid& grid, int trials, std::uint64_t seed);

/// 2 h^d sum_x J(x) . (g * Mtot)(x), g = grad phi at the minimum-image offset.
double interaction_action(const FieldState& state, const Grid& grid, const SystemParams& sys, const WeightSpec& w);

/// Time integrals of the nonlinear Morawetz quantities, accumulated by the
/// trapezoid rule over samples fed in time order.
class NonlinearMorawetz {
 public:
  NonlinearMorawetz(const Grid& grid, const SystemParams& sys, const WeightSpec& w);

  void add(const FieldState& state);

  struct Values {
    double mass_density_sq = 0.0;      // int int |sum m|^2
    double mass_gradient_sq = 0.0;     // int int |sum grad m|^2
    double self_power = 0.0;           // sum gamma_mm int int |u_m|^{2p+4}
    double gradient_kernel = 0.0;      // sum int int int grad m(x) . grad m(y) / |x-y|_eps^3
    double potential_kernel = 0.0;     // sum gamma_mm int int int |u|^{2p+2}(x) |u|^2(y) / |x-y|_eps

    double total() const {
      return mass_density_sq + mass_gradient_sq + self_power + gradient_kernel + potential_kernel;
    }
  };

  struct Sample {
    double t = 0.0;
    Values cumulative;
    double interaction_action = 0.0;
  };

  const std::vector<Sample>& samples() const noexcept { return samples_; }
  Values totals() const { return samples_.empty() ? Values{} : samples_.back().cumulative; }
  double sup_interaction_action() const noexcept { return sup_action_; }
  /// sum_mu ||u_mu(0)||_{H^2}^4 of the first sample.
  double initial_h2_fourth() const noexcept { return h2_fourth_; }
  /// totals().total() / initial_h2_fourth(), 0 for the zero field.
  double fitted_constant() const;

 private:
  Values integrands(const FieldState& state) const;

  Grid grid_;
  SystemParams sys_;
  WeightSpec w_;
  RealField gradient_symbol_;  // |k|^2 F(k), F the transform of (r^2 + eps^2)^{-3/2}
  ComplexField coulomb_hat_;   // transform of the sampled (r^2 + eps^2)^{-1/2}
  std::vector<Sample> samples_;
  Values last_;
  double sup_action_ = 0.0;
  double h2_fourth_ = 0.0;
};

NonlinearMorawetz nonlinear_morawetz_integrals(const std::vector<FieldState>& trajectory, const Grid& grid,
                                               const SystemParams& sys, const WeightSpec& w);

/// sum_mu sum_k |k|^{4s} |DFT(|u_mu|^2)_k|^2 h^d / M, the squared L^2 norm of
/// (-Delta)^s |u_mu|^2 summed over components.
double correlation_norm(const FieldState& state, const Grid& grid, double s);

/// Default exponent (5 - d) / 4.
inline double correlation_exponent(int d) { return (5.0 - d) / 4.0; }

}  // namespace q4nl
