#include "q4nl/system.hpp"

#include <cmath>
#include <string>

#include "q4nl/error.hpp"

namespace q4nl {

CouplingMatrix::CouplingMatrix(int size, std::vector<double> row_major) : size_(size), values_(std::move(row_major)) {
  if (size < 0 || values_.size() != static_cast<std::size_t>(size) * static_cast<std::size_t>(size))
    throw ConfigError("coupling matrix must be square");
}

CouplingMatrix CouplingMatrix::diagonal(int size, double value) {
  CouplingMatrix m(size);
  for (int i = 0; i < size; ++i) m(i, i) = value;
  return m;
}

bool CouplingMatrix::is_symmetric() const {
  for (int i = 0; i < size_; ++i)
    for (int j = i + 1; j < size_; ++j)
      if ((*this)(i, j) != (*this)(j, i)) return false;
  return true;
}

bool CouplingMatrix::is_zero() const {
  for (double v : values_)
    if (v != 0.0) return false;
  return true;
}

SystemParams SystemParams::uniform(int components, double p, int kappa, double gamma) {
  SystemParams sys;
  sys.components = components;
  sys.p = p;
  sys.kappa = kappa;
  sys.beta = CouplingMatrix::constant(components, gamma);
  sys.lambda = CouplingMatrix(components);
  return sys;
}

CouplingMatrix SystemParams::gamma() const {
  CouplingMatrix g(components);
  for (int i = 0; i < components; ++i)
    for (int j = 0; j < components; ++j) g(i, j) = beta(i, j) + components * lambda(i, j);
  return g;
}

bool SystemParams::is_linear() const { return beta.is_zero() && lambda.is_zero(); }

namespace {

void check_matrix(const CouplingMatrix& m, int n, const std::string& name) {
  const std::string path = "system." + name;
  if (m.size() != n) throw ConfigError("must be " + std::to_string(n) + "x" + std::to_string(n), path);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      const std::string entry = path + "[" + std::to_string(i) + "][" + std::to_string(j) + "]";
      if (!std::isfinite(m(i, j)) || m(i, j) < 0.0) throw ConfigError("entries must be finite and nonnegative", entry);
      if (m(i, j) != m(j, i)) throw ConfigError("matrix must be symmetric", entry);
    }
  }
}

}  // namespace

void validate(const SystemParams& sys) {
  if (sys.components < 1) throw ConfigError("at least one component is required", "system.N");
  if (!(sys.p > 0.0) || !std::isfinite(sys.p)) throw ConfigError("p must be positive", "system.p");
  if (sys.kappa != 0 && sys.kappa != 1) throw ConfigError("kappa must be 0 or 1", "system.kappa");
  if (sys.components > 1 && sys.p < 1.0)
    throw ConfigError("p >= 1 is required for coupled systems (N > 1)", "system.p");
  check_matrix(sys.beta, sys.components, "beta");
  check_matrix(sys.lambda, sys.components, "lambda");
  // The free equation (all couplings zero) is allowed as a control case.
  if (!sys.is_linear()) {
    for (int mu = 0; mu < sys.components; ++mu) {
      if (sys.beta(mu, mu) == 0.0 && sys.lambda(mu, mu) == 0.0)
        throw ConfigError("either beta or lambda must have a nonzero diagonal entry",
                          "system.beta[" + std::to_string(mu) + "][" + std::to_string(mu) + "]");
    }
  }
}

}  // namespace q4nl
