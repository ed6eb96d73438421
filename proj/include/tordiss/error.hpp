#pragma once

#include <stdexcept>
#include <string>
#include <vector>
#include <complex>

namespace tordiss {

// Invalid user configuration; carries the offending field path (e.g. "noise.alpha").
class ConfigError : public std::runtime_error {
public:
  ConfigError(std::string field, const std::string& what)
      : std::runtime_error(field + ": " + what), field_(std::move(field)) {}
  const std::string& field() const noexcept { return field_; }

private:
  std::string field_;
};

// An iterative method did not converge; keeps the last iterate for inspection.
class NumericalFailure : public std::runtime_error {
public:
  explicit NumericalFailure(const std::string& what,
                            std::vector<std::complex<double>> iterate = {},
                            double estimate = 0.0)
      : std::runtime_error(what), iterate_(std::move(iterate)), estimate_(estimate) {}
  const std::vector<std::complex<double>>& last_iterate() const noexcept { return iterate_; }
  double last_estimate() const noexcept { return estimate_; }

private:
  std::vector<std::complex<double>> iterate_;
  double estimate_;
};

class DimensionError : public std::invalid_argument {
public:
  using std::invalid_argument::invalid_argument;
};

class UnsupportedError : public std::runtime_error {
public:
  using std::runtime_error::runtime_error;
};

}  // namespace tordiss
