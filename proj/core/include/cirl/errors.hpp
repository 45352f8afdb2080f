#pragma once

#include <stdexcept>
#include <string>

namespace cirl {

/// Raised when an argument lies outside the domain an operation accepts.
class InputDomainError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Raised when an operation is not legal in the object's current state.
class StateError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace cirl
