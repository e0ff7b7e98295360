#pragma once

#include <stdexcept>
#include <string>

namespace automorphic {

/// Input outside the domain of an operation (non-positive y, bad discriminant, ...).
class DomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Evaluation requested at a pole.
class PoleError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Series, quadrature, or root iteration failed to reach its tolerance.
class ConvergenceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lattice enumeration would exceed the configured vector cap.
class CapExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace automorphic
