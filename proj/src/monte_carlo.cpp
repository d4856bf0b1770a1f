#include "poisson_couple/monte_carlo.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <thread>

#include "poisson_couple/errors.hpp"
#include "poisson_couple/rng.hpp"

namespace pcouple {

namespace {

// Exact integer moments of an integer-valued per-replication statistic.
struct Moments {
  std::int64_t sum = 0;
  std::uint64_t sum_sq = 0;

  void observe(std::int64_t x) noexcept {
    sum += x;
    sum_sq += static_cast<std::uint64_t>(x * x);
  }
  void merge(const Moments& o) noexcept {
    sum += o.sum;
    sum_sq += o.sum_sq;
  }
};

struct StreamResult {
  Moments discrepancy;
  Moments mismatch;
  Moments set_diff;
  std::uint64_t draws = 0;
  std::vector<SumSample> pairs;
};

struct Totals {
  Moments discrepancy;
  Moments mismatch;
  Moments set_diff;
  std::uint64_t draws = 0;
  std::vector<SumSample> pairs;
};

std::uint64_t stream_reps(const SimConfig& cfg, unsigned s) {
  const std::uint64_t base = cfg.reps / cfg.streams;
  return base + (s < cfg.reps % cfg.streams ? 1 : 0);
}

StreamResult run_stream(const SimConfig& cfg, unsigned s, const PoissonPMFTable& table, const SetSpec* d,
                        bool keep_pairs) {
  StreamResult out;
  CounterRng rng(cfg.seed, s);
  std::vector<double> uniforms(cfg.n);
  const auto count = stream_reps(cfg, s);
  if (keep_pairs) out.pairs.reserve(count);
  for (std::uint64_t r = 0; r < count; ++r) {
    for (auto& u : uniforms) u = rng.next_open_uniform();
    const auto sample = sum_coupling_sample(cfg.n, cfg.p, uniforms, table);
    const auto l = static_cast<std::int64_t>(sample.l_sum);
    const auto b = static_cast<std::int64_t>(sample.b_sum);
    out.discrepancy.observe(l > b ? l - b : b - l);
    out.mismatch.observe(l != b ? 1 : 0);
    if (d) out.set_diff.observe((d->contains(sample.l_sum) ? 1 : 0) - (d->contains(sample.b_sum) ? 1 : 0));
    if (keep_pairs) out.pairs.push_back(sample);
  }
  out.draws = rng.draws();
  return out;
}

Totals simulate(const SimConfig& cfg, const SetSpec* d, bool keep_pairs) {
  cfg.validate();
  const auto table = poisson_table(cfg.p, kSamplingTableTol);
  std::vector<StreamResult> results(cfg.streams);
  std::vector<std::exception_ptr> errors(cfg.streams);
  {
    std::vector<std::jthread> workers;
    workers.reserve(cfg.streams);
    for (unsigned s = 0; s < cfg.streams; ++s) {
      workers.emplace_back([&, s] {
        try {
          results[s] = run_stream(cfg, s, table, d, keep_pairs);
        } catch (...) {
          errors[s] = std::current_exception();
        }
      });
    }
  }
  Totals totals;
  for (unsigned s = 0; s < cfg.streams; ++s) {
    if (errors[s]) std::rethrow_exception(errors[s]);
    totals.discrepancy.merge(results[s].discrepancy);
    totals.mismatch.merge(results[s].mismatch);
    totals.set_diff.merge(results[s].set_diff);
    totals.draws += results[s].draws;
    if (keep_pairs) totals.pairs.insert(totals.pairs.end(), results[s].pairs.begin(), results[s].pairs.end());
  }
  return totals;
}

EstimateSummary summarize(const SimConfig& cfg, const Moments& m, std::uint64_t draws, std::string name) {
  EstimateSummary s;
  s.statistic_name = std::move(name);
  s.reps = cfg.reps;
  s.seed = cfg.seed;
  s.streams = cfg.streams;
  s.rng_name = std::string(CounterRng::kName);
  s.uniforms_drawn = draws;
  const auto reps = static_cast<long double>(cfg.reps);
  const long double mean = static_cast<long double>(m.sum) / reps;
  s.mean = static_cast<double>(mean);
  if (cfg.reps == 1) {
    s.degenerate = true;
    s.std_error = 0.0;
    return s;
  }
  const long double centered =
      static_cast<long double>(m.sum_sq) - static_cast<long double>(m.sum) * static_cast<long double>(m.sum) / reps;
  const long double variance = std::max(0.0L, centered / (reps - 1.0L));
  s.std_error = static_cast<double>(std::sqrt(variance / reps));
  return s;
}

}  // namespace

void SimConfig::validate() const {
  if (n == 0) throw DomainError("SimConfig: n must be >= 1");
  if (!(p > 0.0 && p < 1.0)) throw DomainError("SimConfig: p must lie in (0,1), got " + std::to_string(p));
  if (reps == 0) throw DomainError("SimConfig: reps must be >= 1");
  if (streams == 0) throw DomainError("SimConfig: streams must be >= 1");
  if (streams > reps) {
    throw DomainError("SimConfig: streams (" + std::to_string(streams) + ") exceeds reps (" +
                      std::to_string(reps) + ")");
  }
}

EstimateSummary estimate_discrepancy(const SimConfig& cfg) {
  const auto t = simulate(cfg, nullptr, false);
  return summarize(cfg, t.discrepancy, t.draws, "discrepancy");
}

EstimateSummary estimate_mismatch(const SimConfig& cfg) {
  const auto t = simulate(cfg, nullptr, false);
  return summarize(cfg, t.mismatch, t.draws, "mismatch");
}

EstimateSummary estimate_set_gap(const SimConfig& cfg, const SetSpec& d) {
  const auto t = simulate(cfg, &d, false);
  auto s = summarize(cfg, t.set_diff, t.draws, "set_gap");
  s.mean = std::fabs(s.mean);
  return s;
}

CoupledEstimates simulate_coupled(const SimConfig& cfg, bool keep_pairs) {
  auto t = simulate(cfg, nullptr, keep_pairs);
  CoupledEstimates out;
  out.discrepancy = summarize(cfg, t.discrepancy, t.draws, "discrepancy");
  out.mismatch = summarize(cfg, t.mismatch, t.draws, "mismatch");
  out.pairs = std::move(t.pairs);
  return out;
}

}  // namespace pcouple
