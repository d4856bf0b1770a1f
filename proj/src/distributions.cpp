#include "poisson_couple/distributions.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "poisson_couple/errors.hpp"
#include "poisson_couple/numeric.hpp"

namespace pcouple {

namespace {

// Below this e^{-rate} loses precision into the subnormal range.
constexpr double kMaxPoissonRate = 700.0;

// Seeds smaller than this are treated as underflowing.
constexpr double kMinBinomialSeed = 1e-280;

std::vector<double> binomial_low_half(unsigned n, double p) {
  std::vector<double> b(static_cast<std::size_t>(n) + 1, 0.0);
  if (p == 0.0) {
    b[0] = 1.0;
    return b;
  }
  const double ratio = p / (1.0 - p);
  const double log_b0 = static_cast<double>(n) * std::log1p(-p);
  if (log_b0 > std::log(kMinBinomialSeed)) {
    b[0] = std::pow(1.0 - p, static_cast<double>(n));
    for (unsigned k = 0; k < n; ++k) {
      b[k + 1] = b[k] * (static_cast<double>(n - k) / (k + 1)) * ratio;
    }
    return b;
  }
  // Modal seed in log space, then recur outward in both directions.
  const double nd = static_cast<double>(n);
  unsigned mode = static_cast<unsigned>(std::floor((nd + 1.0) * p));
  if (mode > n) mode = n;
  const double md = static_cast<double>(mode);
  const double log_bm = std::lgamma(nd + 1.0) - std::lgamma(md + 1.0) - std::lgamma(nd - md + 1.0) +
                        md * std::log(p) + (nd - md) * std::log1p(-p);
  b[mode] = std::exp(log_bm);
  for (unsigned k = mode; k < n; ++k) {
    b[k + 1] = b[k] * (static_cast<double>(n - k) / (k + 1)) * ratio;
  }
  for (unsigned k = mode; k > 0; --k) {
    b[k - 1] = b[k] * (static_cast<double>(k) / (n - k + 1)) / ratio;
  }
  // The ratios are exact to rounding; the lgamma seed carries an error that
  // grows with n, and it is a common factor.
  const double total = compensated_sum(b);
  for (auto& x : b) x /= total;
  return b;
}

}  // namespace

double poisson_tail_bound(double rate, std::size_t k, double r_k) noexcept {
  const double kd = static_cast<double>(k);
  const double next = r_k * (rate / (kd + 1.0));
  const double q = rate / (kd + 2.0);
  if (q >= 1.0) return std::numeric_limits<double>::infinity();
  return next / (1.0 - q);
}

PoissonPMFTable poisson_table(double rate, double tol, std::size_t min_index) {
  if (!(rate > 0.0) || !std::isfinite(rate)) {
    throw DomainError("poisson_table: rate must be positive and finite, got " + std::to_string(rate));
  }
  if (!(tol > 0.0 && tol < 1.0)) {
    throw DomainError("poisson_table: tol must lie in (0,1), got " + std::to_string(tol));
  }
  if (rate > kMaxPoissonRate) {
    throw DomainError("poisson_table: rate " + std::to_string(rate) + " underflows e^{-rate}");
  }

  const auto start = std::max<std::size_t>(static_cast<std::size_t>(std::ceil(rate)), min_index);

  PoissonPMFTable t;
  t.rate_ = rate;
  t.tol_ = tol;
  CompensatedSum acc;
  double r = std::exp(-rate);
  for (std::size_t k = 0;; ++k) {
    t.values_.push_back(r);
    acc += r;
    t.partial_sums_.push_back(acc.value());
    if (k >= start) {
      const double bound = poisson_tail_bound(rate, k, r);
      if (bound <= tol) {
        t.tail_mass_ = bound;
        break;
      }
    }
    r *= rate / static_cast<double>(k + 1);
  }
  return t;
}

BinomialPMFTable binomial_table(unsigned n, double p) {
  if (n == 0) throw DomainError("binomial_table: n must be >= 1");
  if (!(p >= 0.0 && p <= 1.0)) {
    throw DomainError("binomial_table: p must lie in [0,1], got " + std::to_string(p));
  }
  BinomialPMFTable t;
  t.trials_ = n;
  t.success_prob_ = p;
  if (n == 1) {
    t.values_ = {1.0 - p, p};
  } else if (p <= 0.5) {
    t.values_ = binomial_low_half(n, p);
  } else {
    t.values_ = binomial_low_half(n, 1.0 - p);
    std::reverse(t.values_.begin(), t.values_.end());
  }
  return t;
}

double poisson_cdf(const PoissonPMFTable& table, std::size_t k) {
  if (k > table.truncation_index()) {
    throw OutOfRangeError("poisson_cdf: k=" + std::to_string(k) + " exceeds truncation index " +
                          std::to_string(table.truncation_index()) + "; rebuild with a smaller tol");
  }
  return table.partial_sums()[k];
}

}  // namespace pcouple
