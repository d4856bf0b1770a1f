#include <doctest.h>

#include <cmath>
#include <functional>
#include <set>

#include "poisson_couple/approximation.hpp"
#include "poisson_couple/coupling.hpp"
#include "poisson_couple/errors.hpp"
#include "poisson_couple/monte_carlo.hpp"
#include "poisson_couple/rng.hpp"

using namespace pcouple;

namespace {

// 4-standard-error check with one retry on a fresh seed.
bool concordant(const std::function<EstimateSummary(std::uint64_t)>& run, double truth, std::uint64_t seed) {
  for (std::uint64_t attempt = 0; attempt < 2; ++attempt) {
    const auto e = run(seed + attempt);
    if (std::fabs(e.mean - truth) <= 4.0 * e.std_error) return true;
  }
  return false;
}

SimConfig config(unsigned n, double p, std::uint64_t reps, std::uint64_t seed, unsigned streams = 1) {
  SimConfig c;
  c.n = n;
  c.p = p;
  c.reps = reps;
  c.seed = seed;
  c.streams = streams;
  return c;
}

}  // namespace

TEST_CASE("CounterRng yields open-interval uniforms reproducibly") {
  CounterRng a(42, 0);
  CounterRng b(42, 0);
  CounterRng other(42, 1);
  int same_as_other = 0;
  for (int i = 0; i < 100000; ++i) {
    const double u = a.next_open_uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    REQUIRE(u == b.next_open_uniform());
    if (u == other.next_open_uniform()) ++same_as_other;
  }
  CHECK(same_as_other == 0);
  CHECK(a.draws() == 100000);
  // Extreme 52-bit values map strictly inside (0,1).
  CHECK((0.0 + 0.5) * 0x1.0p-52 > 0.0);
  CHECK((static_cast<double>((std::uint64_t{1} << 52) - 1) + 0.5) * 0x1.0p-52 < 1.0);
}

TEST_CASE("SimConfig validation") {
  CHECK_THROWS_AS(config(0, 0.5, 10, 1).validate(), DomainError);
  CHECK_THROWS_AS(config(1, 0.0, 10, 1).validate(), DomainError);
  CHECK_THROWS_AS(config(1, 1.0, 10, 1).validate(), DomainError);
  CHECK_THROWS_AS(config(1, 0.5, 0, 1).validate(), DomainError);
  CHECK_THROWS_AS(config(1, 0.5, 10, 1, 0).validate(), DomainError);
  CHECK_THROWS_AS(config(1, 0.5, 3, 1, 4).validate(), DomainError);
  CHECK_NOTHROW(config(1, 0.5, 4, 1, 4).validate());
  CHECK_THROWS_AS(estimate_discrepancy(config(1, 0.5, 3, 1, 4)), DomainError);
}

TEST_CASE("estimates are bit-identical for identical configs") {
  const auto cfg = config(5, 0.2, 20000, 42, 4);
  const auto a = estimate_discrepancy(cfg);
  const auto b = estimate_discrepancy(cfg);
  CHECK(a.mean == b.mean);
  CHECK(a.std_error == b.std_error);
  CHECK(a.rng_name == std::string(CounterRng::kName));
  CHECK(a.seed == 42);
  CHECK(a.streams == 4);

  const auto x = simulate_coupled(cfg, true);
  const auto y = simulate_coupled(cfg, true);
  REQUIRE(x.pairs.size() == y.pairs.size());
  for (std::size_t i = 0; i < x.pairs.size(); ++i) {
    REQUIRE(x.pairs[i].l_sum == y.pairs[i].l_sum);
    REQUIRE(x.pairs[i].b_sum == y.pairs[i].b_sum);
  }
  CHECK(x.discrepancy.mean == a.mean);
}

TEST_CASE("each replication consumes exactly n uniforms") {
  for (unsigned streams : {1U, 3U, 7U}) {
    const auto e = estimate_mismatch(config(6, 0.3, 1001, 9, streams));
    CHECK(e.uniforms_drawn == 1001 * 6);
  }
}

TEST_CASE("a single replication is flagged degenerate") {
  const auto e = estimate_discrepancy(config(3, 0.4, 1, 5));
  CHECK(e.degenerate);
  CHECK(e.std_error == 0.0);
  CHECK(e.reps == 1);
}

TEST_CASE("sampled pairs respect the coupling") {
  const auto one = simulate_coupled(config(1, 0.4, 50000, 3, 2), true);
  for (const auto& s : one.pairs) {
    REQUIRE(s.b_sum <= 1);
    if (s.b_sum == 0) REQUIRE(s.l_sum == 0);
  }
  const auto many = simulate_coupled(config(7, 0.4, 20000, 3, 2), true);
  for (const auto& s : many.pairs) REQUIRE(s.b_sum <= 7);
}

TEST_CASE("stream count changes the sample path but not the estimand") {
  const auto one = estimate_discrepancy(config(10, 0.1, 200000, 17, 1));
  const auto eight = estimate_discrepancy(config(10, 0.1, 200000, 17, 8));
  CHECK(one.mean != eight.mean);
  const double combined = std::hypot(one.std_error, eight.std_error);
  CHECK(std::fabs(one.mean - eight.mean) <= 6.0 * combined);
}

TEST_CASE("estimate_discrepancy agrees with the exact oracles") {
  const double single = expected_discrepancy_single(0.1);
  CHECK(concordant([](std::uint64_t s) { return estimate_discrepancy(config(1, 0.1, 1000000, s, 4)); }, single, 101));

  const double exact = expected_discrepancy_sum(10, 0.1, 1e-12);
  const auto ten = estimate_discrepancy(config(10, 0.1, 1000000, 202, 4));
  CHECK(ten.mean <= 0.1 + 4.0 * ten.std_error);
  CHECK(concordant([](std::uint64_t s) { return estimate_discrepancy(config(10, 0.1, 1000000, s, 4)); }, exact, 202));
}

TEST_CASE("estimate_mismatch agrees with the exact oracles") {
  const double exact = mismatch_probability_single(0.5);
  CHECK(concordant([](std::uint64_t s) { return estimate_mismatch(config(1, 0.5, 1000000, s, 4)); }, exact, 303));

  const auto tiny = estimate_mismatch(config(1, 1e-4, 100000, 404, 2));
  CHECK(tiny.mean >= 0.0);
  CHECK(tiny.mean + 4.0 * tiny.std_error <= 1e-6);

  const auto e = estimate_mismatch(config(4, 0.3, 5000, 1, 1));
  CHECK(e.mean >= 0.0);
  CHECK(e.mean <= 1.0);
}

TEST_CASE("estimate_set_gap") {
  const auto all = estimate_set_gap(config(5, 0.3, 10000, 7, 2), SetSpec::everything());
  CHECK(all.mean == 0.0);
  CHECK(all.std_error == 0.0);

  const auto d0 = SetSpec::explicit_set({0});
  const double exact = set_gap(10, 0.1, d0, 1e-12);
  CHECK(concordant([&](std::uint64_t s) { return estimate_set_gap(config(10, 0.1, 1000000, s, 4), d0); }, exact,
                   505));

  for (const auto& d : {SetSpec::explicit_set({0}), SetSpec::interval(2), SetSpec::parse("!1,3")}) {
    const auto cfg = config(10, 0.1, 100000, 606, 2);
    const auto gap = estimate_set_gap(cfg, d);
    const auto mismatch = estimate_mismatch(cfg);
    CHECK(gap.mean <= mismatch.mean + 4.0 * std::hypot(gap.std_error, mismatch.std_error));
  }
}
