#pragma once

#include <stdexcept>
#include <string>

namespace logcor {

/// An argument outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// A request larger than what a sampler or table supports.
class CapacityError : public std::length_error {
 public:
  using std::length_error::length_error;
};

/// Evaluation at a singular point (e.g. on top of an eigenangle).
class SingularityError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

namespace detail {

inline void require(bool ok, const std::string& what) {
  if (!ok) throw DomainError(what);
}

inline void require_capacity(bool ok, const std::string& what) {
  if (!ok) throw CapacityError(what);
}

}  // namespace detail
}  // namespace logcor
