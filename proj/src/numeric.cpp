#include "poisson_couple/numeric.hpp"

namespace pcouple {

double exp_neg_minus_linear(double x) noexcept {
  if (std::fabs(x) < 0.5) {
    // Alternating series sum_{k>=2} (-x)^k / k!; terms fall below 1e-17 of
    // the leading x^2/2 well before k = 25.
    double term = x * x / 2.0;
    CompensatedSum acc;
    acc += term;
    for (int k = 3; k < 25; ++k) {
      term *= -x / k;
      acc += term;
    }
    return acc.value();
  }
  return std::expm1(-x) + x;
}

}  // namespace pcouple
