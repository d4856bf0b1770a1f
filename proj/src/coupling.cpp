#include "poisson_couple/coupling.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "poisson_couple/errors.hpp"
#include "poisson_couple/numeric.hpp"

namespace pcouple {

namespace {

void require_open_unit(double p, const char* op) {
  if (!(p > 0.0 && p < 1.0)) {
    throw DomainError(std::string(op) + ": p must lie in (0,1), got " + std::to_string(p));
  }
}

void require_tol(double tol, const char* op) {
  if (!(tol > 0.0 && tol < 1.0)) {
    throw DomainError(std::string(op) + ": tol must lie in (0,1), got " + std::to_string(tol));
  }
}

DiffDistribution convolve(const DiffDistribution& a, const DiffDistribution& b) {
  DiffDistribution out;
  out.min_support = a.min_support + b.min_support;
  out.masses.assign(a.masses.size() + b.masses.size() - 1, 0.0);
  for (std::size_t i = 0; i < a.masses.size(); ++i) {
    const double ai = a.masses[i];
    if (ai == 0.0) continue;
    for (std::size_t j = 0; j < b.masses.size(); ++j) {
      out.masses[i + j] += ai * b.masses[j];
    }
  }
  out.tail_mass = a.tail_mass + b.tail_mass;
  return out;
}

// Drops upper-tail masses while their total stays within budget. Keeps at
// least the entry at d = 0.
void trim_upper_tail(DiffDistribution& dist, double budget) {
  double dropped = 0.0;
  while (dist.masses.size() > 1 && dist.max_support() > 0) {
    const double last = dist.masses.back();
    if (dropped + last > budget) break;
    dropped += last;
    dist.masses.pop_back();
  }
  dist.tail_mass += dropped;
}

}  // namespace

double DiffDistribution::mean() const noexcept {
  CompensatedSum acc;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    acc += static_cast<double>(min_support + static_cast<std::int64_t>(i)) * masses[i];
  }
  return acc.value();
}

double DiffDistribution::expected_abs() const noexcept {
  CompensatedSum acc;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    const auto d = min_support + static_cast<std::int64_t>(i);
    acc += static_cast<double>(d < 0 ? -d : d) * masses[i];
  }
  return acc.value();
}

double DiffDistribution::nonzero_mass() const noexcept {
  CompensatedSum acc;
  for (std::size_t i = 0; i < masses.size(); ++i) {
    if (min_support + static_cast<std::int64_t>(i) != 0) acc += masses[i];
  }
  return acc.value();
}

CouplingPair couple_from_uniform(double p, double u, const PoissonPMFTable& table) {
  require_open_unit(p, "couple_from_uniform");
  if (!(u > 0.0 && u < 1.0)) {
    throw DomainError("couple_from_uniform: u must lie in (0,1), got " + std::to_string(u));
  }
  if (table.rate() != p) {
    throw DomainError("couple_from_uniform: table rate " + std::to_string(table.rate()) +
                      " does not match p " + std::to_string(p));
  }
  CouplingPair pair;
  pair.u = u;
  pair.b = u < 1.0 - p ? 0 : 1;

  const auto sums = table.partial_sums();
  const auto it = std::upper_bound(sums.begin(), sums.end(), u);
  if (it == sums.end()) {
    throw RebuildTableError("couple_from_uniform: u=" + std::to_string(u) +
                                " lies beyond the table's last partial sum",
                            (1.0 - u) / 4.0);
  }
  pair.l = static_cast<std::uint64_t>(it - sums.begin());
  return pair;
}

JointPMF joint_pmf(double p, double tol) {
  require_open_unit(p, "joint_pmf");
  require_tol(tol, "joint_pmf");
  const auto table = poisson_table(p, tol);
  JointPMF joint;
  joint.p = p;
  joint.atom_00 = 1.0 - p;
  joint.atom_01 = exp_neg_minus_linear(p);
  const auto r = table.values();
  joint.atoms_k1.assign(r.begin() + 1, r.end());
  joint.truncation_index = table.truncation_index();
  joint.tail_mass = table.tail_mass();
  return joint;
}

double expected_discrepancy_single(double p) {
  require_open_unit(p, "expected_discrepancy_single");
  return 2.0 * exp_neg_minus_linear(p);
}

double mismatch_probability_single(double p) {
  require_open_unit(p, "mismatch_probability_single");
  return -p * std::expm1(-p);
}

DiffDistribution single_diff_distribution(double p, double tol) {
  require_open_unit(p, "single_diff_distribution");
  require_tol(tol, "single_diff_distribution");
  const auto table = poisson_table(p, tol);
  const auto r = table.values();
  DiffDistribution dist;
  dist.min_support = -1;
  dist.masses.reserve(r.size());
  dist.masses.push_back(exp_neg_minus_linear(p));
  dist.masses.push_back((1.0 - p) + (r.size() > 1 ? r[1] : 0.0));
  for (std::size_t k = 2; k < r.size(); ++k) dist.masses.push_back(r[k]);
  dist.tail_mass = table.tail_mass();
  return dist;
}

DiffDistribution nfold_diff_distribution(unsigned n, double p, double tol, ConvolutionOptions opts) {
  if (n == 0) throw DomainError("nfold_diff_distribution: n must be >= 1");
  require_open_unit(p, "nfold_diff_distribution");
  require_tol(tol, "nfold_diff_distribution");

  std::size_t cap = opts.max_support;
  if (cap == 0) {
    const double np = static_cast<double>(n) * p;
    cap = static_cast<std::size_t>(10.0 * (np + 10.0 * std::sqrt(np) + static_cast<double>(n)));
  }

  // n component tables plus n-1 trims share the budget equally.
  const double budget = tol / (2.0 * static_cast<double>(n) - 1.0);
  const auto single = single_diff_distribution(p, budget);
  auto acc = single;
  for (unsigned i = 1; i < n; ++i) {
    acc = convolve(acc, single);
    trim_upper_tail(acc, budget);
    if (acc.masses.size() > cap) {
      throw ResourceError("nfold_diff_distribution: support length " + std::to_string(acc.masses.size()) +
                          " exceeds cap " + std::to_string(cap));
    }
  }
  if (acc.masses.size() > cap) {
    throw ResourceError("nfold_diff_distribution: support length " + std::to_string(acc.masses.size()) +
                        " exceeds cap " + std::to_string(cap));
  }
  return acc;
}

double expected_discrepancy_sum(unsigned n, double p, double tol) {
  return nfold_diff_distribution(n, p, tol).expected_abs();
}

SumSample sum_coupling_sample(unsigned n, double p, std::span<const double> uniforms,
                              const PoissonPMFTable& table) {
  if (n == 0) throw DomainError("sum_coupling_sample: n must be >= 1");
  if (uniforms.size() != n) {
    throw DomainError("sum_coupling_sample: expected " + std::to_string(n) + " uniforms, got " +
                      std::to_string(uniforms.size()));
  }
  SumSample s;
  for (double u : uniforms) {
    const auto pair = couple_from_uniform(p, u, table);
    s.l_sum += pair.l;
    s.b_sum += static_cast<std::uint64_t>(pair.b);
  }
  return s;
}

}  // namespace pcouple
