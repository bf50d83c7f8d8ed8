#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace nubound {

/// Raised when two objects that must agree in dimension do not.
class DimensionMismatch : public std::invalid_argument {
public:
  DimensionMismatch(const std::string& what, std::size_t expected, std::size_t got)
      : std::invalid_argument(what + ": expected dimension " + std::to_string(expected) +
                              ", got " + std::to_string(got)),
        expected_(expected), got_(got) {}

  std::size_t expected() const noexcept { return expected_; }
  std::size_t got() const noexcept { return got_; }

private:
  std::size_t expected_;
  std::size_t got_;
};

/// No closed-form norm-equivalence constant is implemented for a norm pair.
class NoClosedFormError : public std::logic_error {
public:
  using std::logic_error::logic_error;
};

/// A utility bound was requested for a mapping whose utility is unbounded
/// (asymptotic eigenvalue equal to zero).
class UnboundedUtilityError : public std::domain_error {
public:
  using std::domain_error::domain_error;
};

} // namespace nubound
