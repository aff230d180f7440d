#pragma once

#include <stdexcept>

namespace hardyc {

/// A caller-supplied argument violates a documented precondition.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The evaluation point coincides (to 1e-14 in reduced units) with a pole.
class PoleError : public InputError {
 public:
  using InputError::InputError;
};

/// A numerical procedure did not reach its target (factorization, iteration budget).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace hardyc
