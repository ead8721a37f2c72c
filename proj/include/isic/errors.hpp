#pragma once

#include <stdexcept>
#include <string>

namespace isic {

class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Base for failures that come from the numbers rather than the call shape.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class SingularMatrix : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

// A rank-1 or scalar update whose denominator collapsed.
class DegenerateUpdate : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class PositiveDefinitenessLost : public NumericalError {
 public:
  using NumericalError::NumericalError;
};

class InternalConsistencyError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace isic
