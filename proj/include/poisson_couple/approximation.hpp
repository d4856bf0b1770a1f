#pragma once

#include "poisson_couple/distributions.hpp"
#include "poisson_couple/set_spec.hpp"

namespace pcouple {

/// Slack allowed on each link of the inequality chain, on top of tol.
inline constexpr double kChainSlack = 1e-12;

/// 1e-12, scaled up linearly once np exceeds 100.
double default_tolerance(unsigned n, double p) noexcept;

/// P(B in D). Sets with an infinite part go through the finite complement,
/// the same way as the Poisson overload.
double set_probability(const BinomialPMFTable& table, const SetSpec& d);

/// P(L in D). Sets with an infinite part are computed through the finite
/// complement so the error stays within the table's tail mass. Throws
/// RebuildTableError if D needs an index beyond the truncation point.
double set_probability(const PoissonPMFTable& table, const SetSpec& d);

/// |P(Poisson(np) in D) - P(Binomial(n,p) in D)|.
double set_gap(unsigned n, double p, const SetSpec& d, double tol);

/// Total variation distance between Binomial(n,p) and Poisson(np).
double tv_distance(unsigned n, double p, double tol);

struct WorstCaseSet {
  SetSpec set;
  double gap = 0.0;
};

/// D* = {k : poisson_pmf(k) > binomial_pmf(k)}. Every k > n belongs to D*, so
/// it is returned as the complement of a finite subset of {0..n}.
WorstCaseSet worst_case_set(unsigned n, double p, double tol);

struct BoundReport {
  unsigned n = 0;
  double p = 0.0;
  double tv_distance = 0.0;
  double worst_set_gap = 0.0;
  double mismatch_prob = 0.0;         // P(L != B) for the summed coupling
  double expected_discrepancy = 0.0;  // E|L - B| for the summed coupling
  double markov_bound = 0.0;          // E|L - B| read as a bound on P(|L - B| >= 1)
  double paper_bound = 0.0;           // np^2
  double tol = 0.0;

  bool tv_le_mismatch() const noexcept { return tv_distance <= mismatch_prob + tol + kChainSlack; }
  bool mismatch_le_markov() const noexcept { return mismatch_prob <= markov_bound + tol + kChainSlack; }
  bool markov_le_np2() const noexcept { return expected_discrepancy <= paper_bound + tol + kChainSlack; }
  bool gap_matches_tv() const noexcept;
  bool consistent() const noexcept {
    return tv_le_mismatch() && mismatch_le_markov() && markov_le_np2() && gap_matches_tv();
  }
};

/// Assembles every link of tv <= P(L != B) <= E|L - B| <= np^2 without
/// auditing them.
BoundReport compute_bound_report(unsigned n, double p, double tol);

/// compute_bound_report() followed by the audit: throws InconsistencyError
/// if a link fails beyond its slack.
BoundReport bound_report(unsigned n, double p, double tol);

}  // namespace pcouple
