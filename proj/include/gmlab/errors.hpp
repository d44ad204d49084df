#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>
#include <utility>

namespace gmlab {

/// Base class of every exception thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A model, grid or experiment parameter is missing, non-finite or out of range.
class InvalidParameter : public Error {
 public:
  InvalidParameter(std::string field, const std::string& reason)
      : Error("invalid parameter '" + field + "': " + reason), field_(std::move(field)) {}

  const std::string& field() const noexcept { return field_; }

 private:
  std::string field_;
};

/// The inhibitor reached a nonpositive value where u^p/xi^q is required.
class DegenerateInhibitor : public Error {
 public:
  using Error::Error;
};

/// A simulation spec is internally inconsistent (noise/control/grid mismatch).
class InvalidSpec : public Error {
 public:
  using Error::Error;
};

/// Fixed-point iteration hit its iteration cap.
class NoConvergence : public Error {
 public:
  NoConvergence(std::size_t iterations, double last_distance)
      : Error("no convergence after " + std::to_string(iterations) +
              " iterations (last distance " + std::to_string(last_distance) + ")"),
        iterations_(iterations),
        last_distance_(last_distance) {}

  std::size_t iterations() const noexcept { return iterations_; }
  double last_distance() const noexcept { return last_distance_; }

 private:
  std::size_t iterations_;
  double last_distance_;
};

class MismatchedPath : public Error {
 public:
  using Error::Error;
};

class MismatchedControl : public Error {
 public:
  using Error::Error;
};

/// A bound that is only stated at unit noise amplitude was asked for at another amplitude.
class WrongNormalization : public Error {
 public:
  using Error::Error;
};

/// The (rho, ell, delta) triple violates the energy-estimate admissibility set.
class ConstraintViolation : public Error {
 public:
  using Error::Error;
};

/// Config file problem; carries the offending line (0 when not line-specific) and key.
class ConfigError : public Error {
 public:
  ConfigError(std::size_t line, std::string key, const std::string& reason)
      : Error(format(line, key, reason)), line_(line), key_(std::move(key)) {}

  std::size_t line() const noexcept { return line_; }
  const std::string& key() const noexcept { return key_; }

 private:
  static std::string format(std::size_t line, const std::string& key, const std::string& reason) {
    std::string out = "config error";
    if (line > 0) out += " at line " + std::to_string(line);
    if (!key.empty()) out += " (key '" + key + "')";
    return out + ": " + reason;
  }

  std::size_t line_;
  std::string key_;
};

}  // namespace gmlab
