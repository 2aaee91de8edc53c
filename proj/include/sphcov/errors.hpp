#pragma once

#include <stdexcept>
#include <string>

namespace sphcov {

/// Malformed input: bad polynomial text, mismatched dimensions, invalid
/// configuration values.
class InputError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A request that is well-formed but outside the range where the underlying
/// identity or density is defined (for example a second-order identity in
/// dimension n < 5).
class ScopeError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

}  // namespace sphcov
