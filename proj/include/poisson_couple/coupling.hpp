#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "poisson_couple/distributions.hpp"

namespace pcouple {

/// One draw of the quantile coupling: both outcomes read off the same uniform.
struct CouplingPair {
  std::uint64_t l = 0;  // Poisson(p) outcome
  int b = 0;            // Bernoulli(p) outcome
  double u = 0.0;
};

/// Exact law of (L, B) under the single-uniform coupling.
///
/// The unit interval splits into [0, 1-p) -> (0,0), [1-p, r_0) -> (0,1) and
/// [s_{k-1}, s_k) -> (k,1) for k >= 1, so the atoms are interval lengths.
struct JointPMF {
  double p = 0.0;
  double atom_00 = 0.0;
  double atom_01 = 0.0;
  std::vector<double> atoms_k1;  // atoms_k1[k-1] is P(L=k, B=1), k >= 1
  std::size_t truncation_index = 0;
  double tail_mass = 0.0;

  double atom_k1(std::size_t k) const noexcept {
    return k >= 1 && k - 1 < atoms_k1.size() ? atoms_k1[k - 1] : 0.0;
  }
};

/// Integer-valued law of L - B, indexed from min_support upward.
struct DiffDistribution {
  std::int64_t min_support = 0;
  std::vector<double> masses;
  double tail_mass = 0.0;

  std::int64_t max_support() const noexcept {
    return min_support + static_cast<std::int64_t>(masses.size()) - 1;
  }
  double mass(std::int64_t d) const noexcept {
    if (d < min_support || d > max_support()) return 0.0;
    return masses[static_cast<std::size_t>(d - min_support)];
  }
  double mean() const noexcept;
  double expected_abs() const noexcept;
  /// Mass off zero, summed directly rather than as 1 - mass(0).
  double nonzero_mass() const noexcept;
};

/// Places u in the coupling's partition of (0,1) using half-open intervals.
/// Throws DomainError for p or u outside (0,1) or a table built for a
/// different rate, and RebuildTableError when u >= s_K.
CouplingPair couple_from_uniform(double p, double u, const PoissonPMFTable& table);

JointPMF joint_pmf(double p, double tol);

/// E|L - B| = 2 (e^{-p} - (1 - p)).
double expected_discrepancy_single(double p);

/// P(L != B) = p (1 - e^{-p}).
double mismatch_probability_single(double p);

DiffDistribution single_diff_distribution(double p, double tol);

struct ConvolutionOptions {
  /// Cap on the support length; 0 selects 10 (np + 10 sqrt(np) + n).
  std::size_t max_support = 0;
};

/// n-fold convolution of single_diff_distribution by a sequential left fold.
/// The per-component table gets tol/(2n) and each fold step may trim at most
/// tol/(2n) of upper-tail mass, so total truncated mass stays <= tol.
DiffDistribution nfold_diff_distribution(unsigned n, double p, double tol,
                                         ConvolutionOptions opts = {});

/// Exact E|L - B| for the n-fold sums, from the convolution.
double expected_discrepancy_sum(unsigned n, double p, double tol);

struct SumSample {
  std::uint64_t l_sum = 0;
  std::uint64_t b_sum = 0;
};

/// Couples each component on its own uniform and sums the outcomes.
SumSample sum_coupling_sample(unsigned n, double p, std::span<const double> uniforms,
                              const PoissonPMFTable& table);

}  // namespace pcouple
