#pragma once

#include <stdexcept>
#include <string>

namespace pcouple {

/// Parameter outside the mathematical domain of an operation.
class DomainError : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

/// Index past the covered part of a truncated table.
class OutOfRangeError : public std::out_of_range {
 public:
  using std::out_of_range::out_of_range;
};

/// A truncated Poisson table does not cover the requested point. Carries a
/// tolerance that is small enough for a rebuilt table to cover it.
class RebuildTableError : public std::runtime_error {
 public:
  RebuildTableError(const std::string& what, double required_tol)
      : std::runtime_error(what), required_tol_(required_tol) {}

  double required_tol() const noexcept { return required_tol_; }

 private:
  double required_tol_;
};

/// A computation would exceed a configured size cap.
class ResourceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A self-audit found quantities violating an inequality they must satisfy.
class InconsistencyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pcouple
