#include "poisson_couple/approximation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "poisson_couple/coupling.hpp"
#include "poisson_couple/errors.hpp"
#include "poisson_couple/numeric.hpp"

namespace pcouple {

namespace {

void require_args(unsigned n, double p, double tol, const char* op) {
  if (n == 0) throw DomainError(std::string(op) + ": n must be >= 1");
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError(std::string(op) + ": p must lie in (0,1), got " + std::to_string(p));
  }
  if (!(tol > 0.0 && tol < 1.0)) {
    throw DomainError(std::string(op) + ": tol must lie in (0,1), got " + std::to_string(tol));
  }
}

template <class Table>
double sum_members(const Table& table, const std::vector<std::uint64_t>& members) {
  CompensatedSum acc;
  for (auto k : members) acc += table.pmf(static_cast<std::size_t>(k));
  return acc.value();
}

template <class Table>
double sum_range(const Table& table, std::uint64_t lo, std::uint64_t hi) {
  CompensatedSum acc;
  for (auto k = lo; k <= hi; ++k) acc += table.pmf(static_cast<std::size_t>(k));
  return acc.value();
}

}  // namespace

double default_tolerance(unsigned n, double p) noexcept {
  const double np = static_cast<double>(n) * p;
  return 1e-12 * std::max(1.0, np / 100.0);
}

double set_probability(const BinomialPMFTable& table, const SetSpec& d) {
  const auto n = static_cast<std::uint64_t>(table.trials());
  switch (d.kind()) {
    case SetSpec::Kind::Explicit:
      return sum_members(table, d.members());
    case SetSpec::Kind::Interval:
      if (d.lo() > n) return 0.0;
      if (d.hi()) return sum_range(table, d.lo(), std::min(n, *d.hi()));
      if (d.lo() == 0) return 1.0;
      return 1.0 - sum_range(table, 0, d.lo() - 1);
    case SetSpec::Kind::Complement:
      return 1.0 - sum_members(table, d.members());
  }
  return 0.0;
}

double set_probability(const PoissonPMFTable& table, const SetSpec& d) {
  const auto K = static_cast<std::uint64_t>(table.truncation_index());
  if (const auto top = d.max_finite_point(); top && *top > K) {
    double r = table.values().back();
    for (auto k = K; k < *top && r > 0.0; ++k) r *= table.rate() / static_cast<double>(k + 1);
    const double needed = std::max(poisson_tail_bound(table.rate(), static_cast<std::size_t>(*top), r),
                                   std::numeric_limits<double>::min());
    throw RebuildTableError("set_probability: set reaches k=" + std::to_string(*top) +
                                " beyond the Poisson truncation index " + std::to_string(K),
                            std::min(needed, table.tolerance()));
  }
  switch (d.kind()) {
    case SetSpec::Kind::Explicit:
      return sum_members(table, d.members());
    case SetSpec::Kind::Interval:
      if (d.hi()) return sum_range(table, d.lo(), *d.hi());
      if (d.lo() == 0) return 1.0;
      return 1.0 - sum_range(table, 0, d.lo() - 1);
    case SetSpec::Kind::Complement:
      return 1.0 - sum_members(table, d.members());
  }
  return 0.0;
}

double set_gap(unsigned n, double p, const SetSpec& d, double tol) {
  require_args(n, p, tol, "set_gap");
  const std::size_t cover = static_cast<std::size_t>(d.max_finite_point().value_or(0));
  const auto poisson = poisson_table(static_cast<double>(n) * p, tol, cover);
  const auto binomial = binomial_table(n, p);
  return std::fabs(set_probability(poisson, d) - set_probability(binomial, d));
}

double tv_distance(unsigned n, double p, double tol) {
  require_args(n, p, tol, "tv_distance");
  const auto poisson = poisson_table(static_cast<double>(n) * p, tol, n);
  const auto binomial = binomial_table(n, p);
  // Both laws have total mass one, so the distance is the binomial excess,
  // which lives on {0..n} and never touches the Poisson tail.
  CompensatedSum acc;
  for (std::size_t k = 0; k <= n; ++k) {
    const double excess = binomial.pmf(k) - poisson.pmf(k);
    if (excess > 0.0) acc += excess;
  }
  return acc.value();
}

WorstCaseSet worst_case_set(unsigned n, double p, double tol) {
  require_args(n, p, tol, "worst_case_set");
  const auto poisson = poisson_table(static_cast<double>(n) * p, tol, n);
  const auto binomial = binomial_table(n, p);
  std::vector<std::uint64_t> excluded;
  for (std::size_t k = 0; k <= n; ++k) {
    if (!(poisson.pmf(k) > binomial.pmf(k))) excluded.push_back(k);
  }
  WorstCaseSet out{SetSpec::complement_of(std::move(excluded)), 0.0};
  out.gap = set_gap(n, p, out.set, tol);
  return out;
}

bool BoundReport::gap_matches_tv() const noexcept {
  return std::fabs(tv_distance - worst_set_gap) <= tol + kChainSlack;
}

BoundReport compute_bound_report(unsigned n, double p, double tol) {
  require_args(n, p, tol, "bound_report");
  BoundReport r;
  r.n = n;
  r.p = p;
  r.tol = tol;
  r.tv_distance = tv_distance(n, p, tol);
  r.worst_set_gap = worst_case_set(n, p, tol).gap;
  const auto diff = nfold_diff_distribution(n, p, tol);
  r.mismatch_prob = 1.0 - diff.mass(0);
  r.expected_discrepancy = diff.expected_abs();
  r.markov_bound = r.expected_discrepancy;
  r.paper_bound = static_cast<double>(n) * p * p;
  return r;
}

BoundReport bound_report(unsigned n, double p, double tol) {
  const auto r = compute_bound_report(n, p, tol);
  if (!r.consistent()) {
    std::ostringstream msg;
    msg.precision(17);
    msg << "bound_report: inequality chain violated at n=" << n << " p=" << p << ": tv=" << r.tv_distance
        << " worst_gap=" << r.worst_set_gap << " mismatch=" << r.mismatch_prob
        << " e_disc=" << r.expected_discrepancy << " np2=" << r.paper_bound;
    throw InconsistencyError(msg.str());
  }
  return r;
}

}  // namespace pcouple
