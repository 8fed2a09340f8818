#pragma once

#include <stdexcept>
#include <string>

namespace q4nl {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid parameters or configuration. `path()` names the offending entry
/// (e.g. "system.beta[0][1]") when the error comes from a config tree.
class ConfigError : public Error {
 public:
  explicit ConfigError(const std::string& message, std::string path = {})
      : Error(path.empty() ? message : path + ": " + message), path_(std::move(path)) {}
  const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

/// Initial data that puts non-negligible mass next to the torus boundary.
class BoundaryContamination : public Error {
 public:
  using Error::Error;
};

/// NaN/Inf detected in a field during time integration.
class BlowUpError : public Error {
 public:
  using Error::Error;
};

/// Malformed or incompatible serialized data.
class FormatError : public Error {
 public:
  using Error::Error;
};

}  // namespace q4nl
