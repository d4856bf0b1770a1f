#pragma once

// Reference computations that share no code path with the library proper:
// closed pmf formulas via log-factorials and brute-force enumeration.

#include <cstdint>
#include <vector>

namespace pcouple::oracle {

/// ln k! accumulated as a sum of logarithms.
double log_factorial(std::uint64_t k);

/// e^{-rate} rate^k / k! evaluated in log space.
double poisson_pmf(double rate, std::uint64_t k);

/// C(n,k) p^k (1-p)^{n-k} evaluated in log space.
double binomial_pmf(unsigned n, double p, unsigned k);

/// Law of L - B for n coupled components by enumerating every tuple of
/// per-component outcomes (l_i, b_i) with l_i <= max_l. Index 0 is d = -n.
std::vector<double> enumerate_diff_distribution(unsigned n, double p, unsigned max_l);

struct SubsetMax {
  double gap = 0.0;
  std::vector<std::uint64_t> members;  // finite part of the maximizing set
  bool includes_tail = false;          // whether {k > limit} is in the set
};

/// Maximum of |P(L in D) - P(B in D)| over all D = S u T where S ranges over
/// subsets of {0..limit} and T is empty or {k > limit}.
SubsetMax exhaustive_max_set_gap(unsigned n, double p, unsigned limit);

}  // namespace pcouple::oracle
