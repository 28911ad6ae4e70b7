#pragma once

#include <stdexcept>
#include <string>

namespace thermoprep {

/// Input failed a structural check (non-Hermitian, not a density matrix, bad shape).
class ValidationError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A numeric parameter is outside the range an operation supports.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// The computation cannot be carried out accurately (overflow, near-singular gaps).
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The requested problem exceeds a configured size cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace thermoprep
