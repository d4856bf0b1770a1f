// Acceptance suite: one PASS/FAIL line per criterion, exit status 0 iff all pass.

#include <sys/wait.h>

#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <sstream>
#include <string>
#include <vector>

#include "poisson_couple/approximation.hpp"
#include "poisson_couple/coupling.hpp"
#include "poisson_couple/monte_carlo.hpp"
#include "poisson_couple/numeric.hpp"
#include "poisson_couple/oracles.hpp"
#include "poisson_couple/testing.hpp"
#include "poisson_couple/verify.hpp"

using namespace pcouple;

namespace {

struct Outcome {
  bool passed = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    if (!ok && passed) {
      passed = false;
      detail = what;
    }
  }
};

std::string num(double x) {
  std::ostringstream os;
  os.precision(12);
  os << x;
  return os.str();
}

std::vector<double> percent_grid() {
  std::vector<double> g;
  for (int i = 1; i <= 99; ++i) g.push_back(i / 100.0);
  return g;
}

struct Command {
  int code = -1;
  std::string out;
};

Command shell(const std::string& cmd) {
  Command c;
  FILE* pipe = ::popen((cmd + " 2>/dev/null").c_str(), "r");
  if (!pipe) return c;
  std::array<char, 4096> buf{};
  std::size_t got = 0;
  while ((got = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) c.out.append(buf.data(), got);
  const int status = ::pclose(pipe);
  c.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return c;
}

// ---------------------------------------------------------------------------

Outcome closed_form_discrepancy() {
  Outcome o;
  for (double p : percent_grid()) {
    const auto j = joint_pmf(p, 1e-17);
    CompensatedSum summed;
    summed += j.atom_01;  // |0 - 1|
    for (std::size_t k = 2; k <= j.atoms_k1.size(); ++k) summed += static_cast<double>(k - 1) * j.atom_k1(k);
    const double closed = expected_discrepancy_single(p);
    o.require(std::fabs(closed - summed.value()) <= 1e-12,
              "p=" + num(p) + " closed=" + num(closed) + " summed=" + num(summed.value()));
    o.require(closed <= p * p, "p=" + num(p) + " exceeds p^2");
  }
  return o;
}

Outcome joint_marginals() {
  Outcome o;
  for (double p : percent_grid()) {
    const auto j = joint_pmf(p, 1e-17);
    const auto table = poisson_table(p, 1e-17);
    CompensatedSum b1;
    b1 += j.atom_01;
    for (double a : j.atoms_k1) b1 += a;
    b1 += j.tail_mass;
    o.require(std::fabs(b1.value() - p) <= 1e-12, "p=" + num(p) + " P(b=1)=" + num(b1.value()));
    o.require(std::fabs((j.atom_00 + j.atom_01) - (1.0 - p) - j.atom_01) <= 1e-12, "P(b=0) at p=" + num(p));
    o.require(std::fabs(j.atom_00 + j.atom_01 - table.pmf(0)) <= 1e-12, "l=0 marginal at p=" + num(p));
    for (std::size_t k = 1; k <= table.truncation_index(); ++k) {
      o.require(std::fabs(j.atom_k1(k) - table.pmf(k)) <= 1e-12, "l=" + std::to_string(k) + " at p=" + num(p));
    }
  }
  return o;
}

Outcome theorem_chain() {
  Outcome o;
  constexpr double slack = 1e-10;
  for (unsigned n : {1U, 2U, 5U, 10U, 50U, 100U}) {
    for (double p : {0.001, 0.01, 0.05, 0.1, 0.3}) {
      const auto r = compute_bound_report(n, p, 1e-12);
      const std::string at = "n=" + std::to_string(n) + " p=" + num(p);
      o.require(r.tv_distance <= r.mismatch_prob + slack, at + " tv > mismatch");
      o.require(r.mismatch_prob <= r.expected_discrepancy + slack, at + " mismatch > E|L-B|");
      o.require(r.expected_discrepancy <= r.paper_bound + slack, at + " E|L-B| > np^2");
    }
  }
  return o;
}

Outcome supremum_realization() {
  Outcome o;
  for (unsigned n = 1; n <= 3; ++n) {
    for (double p : {0.1, 0.5}) {
      const double tv = tv_distance(n, p, 1e-12);
      const auto worst = worst_case_set(n, p, 1e-12);
      // Every subset of {0..12}, with and without {k >= 13}, through set_gap.
      double best = 0.0;
      for (std::uint32_t mask = 0; mask < (1U << 13); ++mask) {
        std::vector<std::uint64_t> in, out;
        for (std::uint64_t k = 0; k < 13; ++k) (mask >> k & 1U ? in : out).push_back(k);
        best = std::max(best, set_gap(n, p, SetSpec::explicit_set(in), 1e-12));
        best = std::max(best, set_gap(n, p, SetSpec::complement_of(out), 1e-12));
      }
      const auto brute = oracle::exhaustive_max_set_gap(n, p, 12);
      const std::string at = "n=" + std::to_string(n) + " p=" + num(p);
      o.require(std::fabs(best - tv) <= 1e-10, at + " max set_gap=" + num(best) + " tv=" + num(tv));
      o.require(std::fabs(brute.gap - tv) <= 1e-10, at + " oracle max=" + num(brute.gap) + " tv=" + num(tv));
      o.require(std::fabs(worst.gap - best) <= 1e-10, at + " D* gap=" + num(worst.gap));
    }
  }
  return o;
}

Outcome convolution_vs_enumeration() {
  Outcome o;
  for (unsigned n = 1; n <= 4; ++n) {
    for (double p : {0.1, 0.3}) {
      const auto conv = nfold_diff_distribution(n, p, 1e-12);
      const auto brute = oracle::enumerate_diff_distribution(n, p, 16);
      const std::int64_t lo = -static_cast<std::int64_t>(n);
      const auto hi = std::max<std::int64_t>(conv.max_support(), lo + static_cast<std::int64_t>(brute.size()) - 1);
      double tv = 0.0;
      for (auto d = lo; d <= hi; ++d) {
        const auto i = static_cast<std::size_t>(d - lo);
        tv += std::fabs(conv.mass(d) - (i < brute.size() ? brute[i] : 0.0));
      }
      tv /= 2.0;
      const std::string at = "n=" + std::to_string(n) + " p=" + num(p);
      o.require(tv <= 1e-9, at + " tv=" + num(tv));
      o.require(std::fabs(conv.mean()) <= 1e-9, at + " mean=" + num(conv.mean()));
    }
  }
  return o;
}

Outcome monte_carlo_concordance() {
  Outcome o;
  auto check = [&](const char* label, double truth, const std::function<EstimateSummary(std::uint64_t)>& run) {
    for (std::uint64_t attempt = 0; attempt < 2; ++attempt) {
      const auto e = run(20240601 + attempt);
      if (std::fabs(e.mean - truth) <= 4.0 * e.std_error) return;
      if (attempt == 1) {
        o.require(false, std::string(label) + " mean=" + num(e.mean) + " truth=" + num(truth) +
                             " se=" + num(e.std_error));
      }
    }
  };
  SimConfig disc{10, 0.1, 1000000, 0, 4};
  check("E|L-B| n=10 p=0.1", expected_discrepancy_sum(10, 0.1, 1e-12), [&](std::uint64_t seed) {
    disc.seed = seed;
    return estimate_discrepancy(disc);
  });
  SimConfig mism{1, 0.5, 1000000, 0, 4};
  check("P(L!=B) n=1 p=0.5", mismatch_probability_single(0.5), [&](std::uint64_t seed) {
    mism.seed = seed;
    return estimate_mismatch(mism);
  });
  return o;
}

Outcome cli_determinism() {
  Outcome o;
  const std::string cli = POISSON_COUPLE_CLI;
  const auto sample = cli + " sample --n 5 --p 0.2 --reps 1000 --seed 42 --streams 4";
  const auto a = shell(sample);
  const auto b = shell(sample);
  o.require(a.code == 0 && b.code == 0, "sample exit codes " + std::to_string(a.code) + "/" + std::to_string(b.code));
  o.require(!a.out.empty() && a.out == b.out, "sample outputs differ");

  const auto sweep = cli + " sweep --n 1,2,5,10 --p 0.01,0.1,0.3 --no-banner";
  const auto c = shell(sweep);
  const auto d = shell(sweep);
  o.require(c.code == 0 && d.code == 0, "sweep exit codes");
  o.require(!c.out.empty() && c.out == d.out, "sweep outputs differ");
  return o;
}

Outcome verify_and_fault_injection() {
  Outcome o;
  const auto clean = shell(std::string(POISSON_COUPLE_CLI) + " verify");
  o.require(clean.code == 0, "verify exited " + std::to_string(clean.code));
  const auto faulty = shell(std::string(POISSON_COUPLE_FAULTY_CLI) + " verify --inject-fault");
  o.require(faulty.code == 1, "verify with corrupted table exited " + std::to_string(faulty.code));
  o.require(faulty.out.find("FAIL") != std::string::npos, "corrupted run reported no failing check");

  VerifyOptions opts;
  opts.table_hook = [](PoissonPMFTable t) { return testing::FaultInjector::corrupt_value(std::move(t), 0, 0.5); };
  const auto results = run_verification(opts);
  bool any_failed = false;
  for (const auto& r : results) any_failed |= !r.passed;
  o.require(any_failed, "library verification missed an injected fault");
  return o;
}

}  // namespace

int main() {
  struct Criterion {
    const char* name;
    double budget_seconds;
    std::function<Outcome()> run;
  };
  const std::vector<Criterion> criteria = {
      {"1 closed-form E|L-B| = joint sum, <= p^2 (tol 1e-12)", 1.0, closed_form_discrepancy},
      {"2 joint pmf marginals (tol 1e-12)", 1.0, joint_marginals},
      {"3 tv <= P(L!=B) <= E|L-B| <= np^2 on grid (slack 1e-10)", 10.0, theorem_chain},
      {"4 exhaustive supremum = tv, attained by D* (tol 1e-10)", 30.0, supremum_realization},
      {"5 convolution vs enumeration, tv <= 1e-9, |mean| <= 1e-9", 10.0, convolution_vs_enumeration},
      {"6 Monte Carlo within 4 SE of exact oracles (1 retry)", 30.0, monte_carlo_concordance},
      {"7 byte-identical sample and sweep output", 5.0, cli_determinism},
      {"8 verify exits 0, exits 1 on corrupted table", 60.0, verify_and_fault_injection},
  };

  int failures = 0;
  for (const auto& c : criteria) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o.passed = false;
      o.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.passed && secs > c.budget_seconds) {
      o.passed = false;
      o.detail = "runtime " + num(secs) + " s exceeds " + num(c.budget_seconds) + " s";
    }
    std::printf("[%s] %s (%.2f s)%s%s\n", o.passed ? "PASS" : "FAIL", c.name, secs, o.passed ? "" : ": ",
                o.detail.c_str());
    if (!o.passed) ++failures;
  }
  std::printf("%d/%zu acceptance criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
