#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace pcouple {

namespace testing {
struct FaultInjector;
}

/// Truncated Poisson pmf r_0..r_K with partial sums s_0..s_K.
///
/// The truncation index K is chosen so that a ratio-test envelope certifies
/// the discarded mass beyond K. tail_mass() holds that certified bound, so
/// the true tail lies in [0, tail_mass()].
class PoissonPMFTable {
 public:
  double rate() const noexcept { return rate_; }
  std::span<const double> values() const noexcept { return values_; }
  std::span<const double> partial_sums() const noexcept { return partial_sums_; }
  std::size_t truncation_index() const noexcept { return values_.size() - 1; }
  double tail_mass() const noexcept { return tail_mass_; }
  double tolerance() const noexcept { return tol_; }

  double pmf(std::size_t k) const noexcept { return k < values_.size() ? values_[k] : 0.0; }

 private:
  friend PoissonPMFTable poisson_table(double, double, std::size_t);
  friend struct testing::FaultInjector;

  PoissonPMFTable() = default;

  double rate_ = 0.0;
  double tol_ = 0.0;
  double tail_mass_ = 0.0;
  std::vector<double> values_;
  std::vector<double> partial_sums_;
};

/// Binomial pmf b_0..b_n.
class BinomialPMFTable {
 public:
  unsigned trials() const noexcept { return trials_; }
  double success_prob() const noexcept { return success_prob_; }
  std::span<const double> values() const noexcept { return values_; }

  double pmf(std::size_t k) const noexcept { return k < values_.size() ? values_[k] : 0.0; }

 private:
  friend BinomialPMFTable binomial_table(unsigned, double);

  BinomialPMFTable() = default;

  unsigned trials_ = 0;
  double success_prob_ = 0.0;
  std::vector<double> values_;
};

/// Certified upper bound on sum_{j > k} r_j given r_k, valid for k >= rate.
double poisson_tail_bound(double rate, std::size_t k, double r_k) noexcept;

/// Builds the Poisson(rate) table by the recurrence r_{k+1} = r_k * rate / (k+1)
/// from r_0 = e^{-rate}. K is the first index >= max(ceil(rate), min_index)
/// whose certified tail bound is <= tol.
///
/// Throws DomainError for rate <= 0, for tol outside (0,1), and for rates so
/// large that e^{-rate} underflows.
PoissonPMFTable poisson_table(double rate, double tol, std::size_t min_index = 0);

/// Binomial(n, p) table. Accepts the degenerate endpoints p = 0 and p = 1.
///
/// For p <= 1/2 the recurrence b_{k+1} = b_k (n-k)/(k+1) p/(1-p) is seeded at
/// b_0 = (1-p)^n, or at the mode in log space when (1-p)^n would underflow.
/// p > 1/2 is computed as the mirror image of 1-p. n = 1 yields {1-p, p}
/// exactly.
BinomialPMFTable binomial_table(unsigned n, double p);

/// s_k. Throws OutOfRangeError past the truncation index.
double poisson_cdf(const PoissonPMFTable& table, std::size_t k);

}  // namespace pcouple
