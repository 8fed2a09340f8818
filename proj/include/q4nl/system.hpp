#pragma once

#include <cstddef>
#include <vector>

namespace q4nl {

/// Dense N x N real matrix, row-major.
class CouplingMatrix {
 public:
  CouplingMatrix() = default;
  explicit CouplingMatrix(int size, double fill = 0.0)
      : size_(size), values_(static_cast<std::size_t>(size) * static_cast<std::size_t>(size), fill) {}
  CouplingMatrix(int size, std::vector<double> row_major);

  static CouplingMatrix constant(int size, double value) { return CouplingMatrix(size, value); }
  static CouplingMatrix diagonal(int size, double value);

  int size() const noexcept { return size_; }
  double operator()(int row, int col) const { return values_[index(row, col)]; }
  double& operator()(int row, int col) { return values_[index(row, col)]; }
  const std::vector<double>& values() const noexcept { return values_; }

  bool is_symmetric() const;
  bool is_zero() const;

  bool operator==(const CouplingMatrix&) const = default;

 private:
  std::size_t index(int row, int col) const {
    return static_cast<std::size_t>(row) * static_cast<std::size_t>(size_) + static_cast<std::size_t>(col);
  }
  int size_ = 0;
  std::vector<double> values_;
};

/// Coefficients of the coupled system
///   i u_t + (Delta^2 - kappa Delta) u_mu + sum_nu gamma_{mu nu} |u_nu|^{p+1} |u_mu|^{p-1} u_mu = 0
/// with gamma = beta + N lambda.
struct SystemParams {
  int components = 1;
  double p = 1.0;
  int kappa = 0;
  CouplingMatrix beta;
  CouplingMatrix lambda;

  /// Single-equation or fully uniform coupling with the given gamma.
  static SystemParams uniform(int components, double p, int kappa, double gamma);

  CouplingMatrix gamma() const;
  /// True when every coupling vanishes (the free equation).
  bool is_linear() const;

  bool operator==(const SystemParams&) const = default;
};

/// Throws ConfigError (with a config path) on any invariant violation.
void validate(const SystemParams& sys);

}  // namespace q4nl
