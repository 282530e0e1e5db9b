#pragma once

#include <stdexcept>
#include <string>

namespace wavespec {

/// Input outside the mathematical domain of an operation (bad parameter,
/// frequency beyond Nyquist, empty series).
class DomainError : public std::domain_error {
 public:
  explicit DomainError(const std::string& what) : std::domain_error(what) {}
};

/// Inconsistent or unusable configuration (quadrature too coarse, empty
/// frequency selection, missing options). The CLI maps this to exit code 2.
class ConfigError : public std::invalid_argument {
 public:
  explicit ConfigError(const std::string& what) : std::invalid_argument(what) {}
};

/// A computation that should succeed failed numerically (non-PD covariance,
/// circulant embedding with negative eigenvalues). CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace wavespec
