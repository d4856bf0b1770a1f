#pragma once

#include <cstddef>

#include "poisson_couple/distributions.hpp"

namespace pcouple::testing {

/// Fault-injection access to otherwise immutable tables.
struct FaultInjector {
  /// Overwrites r_k and leaves the partial sums as they were.
  static PoissonPMFTable corrupt_value(PoissonPMFTable table, std::size_t k, double value) {
    table.values_.at(k) = value;
    return table;
  }
};

}  // namespace pcouple::testing
