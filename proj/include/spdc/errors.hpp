#pragma once

#include <stdexcept>
#include <string>

namespace spdc {

// Bad input: violated invariants, unknown keys, out-of-range parameters.
class validation_error : public std::runtime_error {
 public:
  explicit validation_error(const std::string& what) : std::runtime_error(what) {}
};

// Numerical failure: indefinite or ill-conditioned forms, non-converged limits,
// clipped integration windows, degenerate proposals.
class numerical_error : public std::runtime_error {
 public:
  explicit numerical_error(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace spdc
