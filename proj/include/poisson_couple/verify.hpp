#pragma once

#include <functional>
#include <string>
#include <vector>

#include "poisson_couple/distributions.hpp"

namespace pcouple {

/// Tolerances below this are beneath the double-precision floor of the checks.
inline constexpr double kMinFeasibleTol = 1e-15;

struct CheckResult {
  std::string name;
  bool passed = true;
  std::string detail;  // first failing case, empty on success
};

struct VerifyOptions {
  double tol = 1e-12;
  /// Applied to every Poisson table the table-level checks inspect.
  std::function<PoissonPMFTable(PoissonPMFTable)> table_hook;
};

/// Invariant violations of a Poisson table; empty when it is sound.
std::vector<std::string> poisson_table_violations(const PoissonPMFTable& table);

/// Runs every invariant grid. Throws DomainError when tol < kMinFeasibleTol
/// or tol >= 1e-6.
std::vector<CheckResult> run_verification(const VerifyOptions& opts);

}  // namespace pcouple
