#pragma once

#include <stdexcept>
#include <string>

namespace vibron {

/// Raised when an eigensolver, tolerance check or integrator breaks down.
class NumericalError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

namespace detail {

inline void require(bool condition, const std::string& message) {
  if (!condition) throw std::invalid_argument(message);
}

}  // namespace detail
}  // namespace vibron
