#pragma once

#include <stdexcept>
#include <string>

namespace qjumps {

/// Input outside the mathematical domain of an operation (η ∉ [0,1], β ∉ [0,1], ...).
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A state with non-positive trace was asked to be normalized.
class DegenerateStateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Bloch vector left the ball by more than integrator roundoff can explain.
class PositivityError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid simulation or unravelling configuration.
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Statistical procedure could not reach a verdict within its budget.
class InconclusiveError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace qjumps
