#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "poisson_couple/coupling.hpp"
#include "poisson_couple/set_spec.hpp"

namespace pcouple {

struct SimConfig {
  unsigned n = 1;
  double p = 0.5;
  std::uint64_t reps = 1;
  std::uint64_t seed = 0;
  unsigned streams = 1;

  /// Throws DomainError unless n >= 1, p in (0,1), reps >= 1 and
  /// 1 <= streams <= reps.
  void validate() const;
};

struct EstimateSummary {
  std::string statistic_name;
  double mean = 0.0;
  double std_error = 0.0;  // sample standard deviation / sqrt(reps)
  std::uint64_t reps = 0;
  std::uint64_t seed = 0;
  unsigned streams = 0;
  std::string rng_name;
  bool degenerate = false;  // reps == 1, std_error is 0 by convention
  std::uint64_t uniforms_drawn = 0;
};

/// Tolerance of the Poisson table used for sampling. Small enough that the
/// last partial sum rounds to 1 and covers every generated uniform.
inline constexpr double kSamplingTableTol = 1e-18;

/// Replications are split into `streams` contiguous blocks; block s has
/// reps / streams entries plus one if s < reps % streams and draws from
/// CounterRng(seed, s). Blocks run concurrently and are reduced in order.
EstimateSummary estimate_discrepancy(const SimConfig& cfg);
EstimateSummary estimate_mismatch(const SimConfig& cfg);
/// |freq(L in D) - freq(B in D)| on the same coupled samples.
EstimateSummary estimate_set_gap(const SimConfig& cfg, const SetSpec& d);

struct CoupledEstimates {
  EstimateSummary discrepancy;
  EstimateSummary mismatch;
  std::vector<SumSample> pairs;  // filled only when requested, in stream order
};

/// Discrepancy and mismatch from one pass over the same samples.
CoupledEstimates simulate_coupled(const SimConfig& cfg, bool keep_pairs);

}  // namespace pcouple
