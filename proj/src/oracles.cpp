#include "poisson_couple/oracles.hpp"

#include <cmath>

namespace pcouple::oracle {

double log_factorial(std::uint64_t k) {
  double acc = 0.0;
  for (std::uint64_t j = 2; j <= k; ++j) acc += std::log(static_cast<double>(j));
  return acc;
}

double poisson_pmf(double rate, std::uint64_t k) {
  return std::exp(-rate + static_cast<double>(k) * std::log(rate) - log_factorial(k));
}

double binomial_pmf(unsigned n, double p, unsigned k) {
  if (k > n) return 0.0;
  const double log_choose = log_factorial(n) - log_factorial(k) - log_factorial(n - k);
  return std::exp(log_choose + k * std::log(p) + (n - k) * std::log(1.0 - p));
}

std::vector<double> enumerate_diff_distribution(unsigned n, double p, unsigned max_l) {
  // Per-component atoms (d, mass) for d = l - b.
  std::vector<std::pair<int, double>> atoms;
  atoms.emplace_back(0, 1.0 - p);                       // (0,0)
  atoms.emplace_back(-1, std::exp(-p) - (1.0 - p));     // (0,1)
  for (unsigned l = 1; l <= max_l; ++l) atoms.emplace_back(static_cast<int>(l) - 1, poisson_pmf(p, l));

  const std::size_t width = static_cast<std::size_t>(n) * (max_l + 1) + 1;
  std::vector<double> out(width, 0.0);
  std::vector<std::size_t> idx(n, 0);
  while (true) {
    double mass = 1.0;
    int d = 0;
    for (unsigned i = 0; i < n; ++i) {
      mass *= atoms[idx[i]].second;
      d += atoms[idx[i]].first;
    }
    out[static_cast<std::size_t>(d + static_cast<int>(n))] += mass;
    unsigned i = 0;
    for (; i < n; ++i) {
      if (++idx[i] < atoms.size()) break;
      idx[i] = 0;
    }
    if (i == n) break;
  }
  return out;
}

SubsetMax exhaustive_max_set_gap(unsigned n, double p, unsigned limit) {
  const double rate = n * p;
  std::vector<double> diff(limit + 1);
  double poisson_head = 0.0;
  double binomial_head = 0.0;
  for (unsigned k = 0; k <= limit; ++k) {
    const double r = poisson_pmf(rate, k);
    const double b = binomial_pmf(n, p, k);
    diff[k] = r - b;
    poisson_head += r;
    binomial_head += b;
  }
  const double tail_diff = (1.0 - poisson_head) - (1.0 - binomial_head);

  SubsetMax best;
  const std::uint64_t subsets = std::uint64_t{1} << (limit + 1);
  for (std::uint64_t mask = 0; mask < subsets; ++mask) {
    double head = 0.0;
    for (unsigned k = 0; k <= limit; ++k) {
      if (mask >> k & 1U) head += diff[k];
    }
    for (int tail = 0; tail < 2; ++tail) {
      const double gap = std::fabs(head + (tail ? tail_diff : 0.0));
      if (gap > best.gap) {
        best.gap = gap;
        best.includes_tail = tail != 0;
        best.members.clear();
        for (unsigned k = 0; k <= limit; ++k) {
          if (mask >> k & 1U) best.members.push_back(k);
        }
      }
    }
  }
  return best;
}

}  // namespace pcouple::oracle
