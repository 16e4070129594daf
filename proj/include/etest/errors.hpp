#pragma once

#include <stdexcept>
#include <string>

namespace etest {

// Malformed or contradictory input: bad probabilities, mismatched outcome
// spaces, out-of-range parameters.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

class ModelMismatch : public InputError {
 public:
  using InputError::InputError;
};

// The requested object does not exist for these inputs.
class InfeasibleError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Level zero combined with a utility that is unbounded on the grid.
class FrameworkViolation : public InfeasibleError {
 public:
  using InfeasibleError::InfeasibleError;
};

class NonConvergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace etest
