#pragma once

#include <stdexcept>
#include <string>

namespace gpcycle {

/// Argument outside an operation's domain (negative income, q >= 1, unsorted grid).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Distribution or model parameters that violate a type invariant.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Malformed or insufficient input data.
class DataError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// An iterative procedure failed to converge.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace gpcycle
