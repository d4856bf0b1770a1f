#include "poisson_couple/verify.hpp"

#include <cmath>
#include <sstream>

#include "poisson_couple/approximation.hpp"
#include "poisson_couple/coupling.hpp"
#include "poisson_couple/errors.hpp"
#include "poisson_couple/numeric.hpp"
#include "poisson_couple/oracles.hpp"

namespace pcouple {

namespace {

constexpr double kExactSlack = 1e-12;
constexpr double kConvolutionSlack = 1e-9;
constexpr double kSupremumSlack = 1e-10;

const std::vector<unsigned> kChainN = {1, 2, 5, 10, 50, 100};
const std::vector<double> kChainP = {0.001, 0.01, 0.05, 0.1, 0.3};

std::vector<double> percent_grid() {
  std::vector<double> grid;
  for (int i = 1; i <= 99; ++i) grid.push_back(i / 100.0);
  return grid;
}

double relative_gap(double a, double b) {
  const double scale = std::max(std::fabs(a), std::fabs(b));
  return scale == 0.0 ? 0.0 : std::fabs(a - b) / scale;
}

std::string describe(std::initializer_list<std::pair<const char*, double>> fields) {
  std::ostringstream os;
  os.precision(17);
  bool first = true;
  for (const auto& [k, v] : fields) {
    if (!first) os << ' ';
    os << k << '=' << v;
    first = false;
  }
  return os.str();
}

// Records the first failure only.
class Check {
 public:
  explicit Check(std::string name) { result_.name = std::move(name); }

  void expect(bool ok, const std::string& detail) {
    if (!ok && result_.passed) {
      result_.passed = false;
      result_.detail = detail;
    }
  }

  CheckResult finish() && { return std::move(result_); }

 private:
  CheckResult result_;
};

PoissonPMFTable hooked(const VerifyOptions& opts, PoissonPMFTable t) {
  return opts.table_hook ? opts.table_hook(std::move(t)) : t;
}

CheckResult check_poisson_tables(const VerifyOptions& opts) {
  Check c("poisson tables: recurrence, partial sums, certified tail, log-factorial cross-check");
  for (double rate : {0.001, 0.1, 0.5, 1.0, 2.5, 5.0, 12.0, 20.0, 30.0}) {
    const auto table = hooked(opts, poisson_table(rate, opts.tol, 40));
    const auto problems = poisson_table_violations(table);
    c.expect(problems.empty(), problems.empty() ? "" : describe({{"rate", rate}}) + ": " + problems.front());
  }
  return std::move(c).finish();
}

CheckResult check_binomial_tables() {
  Check c("binomial tables sum to 1 and match closed-form pmf");
  for (unsigned n : {1U, 2U, 7U, 50U, 100U, 400U}) {
    for (double p : {0.0, 0.001, 0.1, 0.3, 0.5, 0.7, 0.99, 1.0}) {
      const auto t = binomial_table(n, p);
      const double total = compensated_sum(t.values());
      c.expect(std::fabs(total - 1.0) <= kExactSlack, describe({{"n", n}, {"p", p}, {"sum", total}}));
      if (p > 0.0 && p < 1.0) {
        for (unsigned k = 0; k <= n; ++k) {
          const double want = oracle::binomial_pmf(n, p, k);
          if (want < 1e-280) continue;
          c.expect(relative_gap(t.pmf(k), want) <= 1e-9, describe({{"n", n}, {"p", p}, {"k", k}}));
        }
      }
    }
  }
  return std::move(c).finish();
}

double joint_expected_abs(const JointPMF& j) {
  CompensatedSum acc;
  acc += j.atom_01;
  for (std::size_t k = 2; k <= j.atoms_k1.size(); ++k) acc += static_cast<double>(k - 1) * j.atom_k1(k);
  return acc.value();
}

CheckResult check_closed_form(const VerifyOptions& opts) {
  Check c("E|L-B| closed form equals joint-pmf sum on p grid");
  for (double p : percent_grid()) {
    const auto j = joint_pmf(p, opts.tol * 1e-3);
    const double closed = expected_discrepancy_single(p);
    const double summed = joint_expected_abs(j);
    c.expect(std::fabs(closed - summed) <= kExactSlack + opts.tol,
             describe({{"p", p}, {"closed", closed}, {"summed", summed}}));
  }
  return std::move(c).finish();
}

CheckResult check_inequality_one() {
  Check c("expected_discrepancy_single <= p^2 on grid");
  for (double p : percent_grid()) {
    const double e = expected_discrepancy_single(p);
    c.expect(e <= p * p, describe({{"p", p}, {"e_disc", e}}));
  }
  return std::move(c).finish();
}

CheckResult check_joint_marginals(const VerifyOptions& opts) {
  Check c("joint pmf marginals match Bernoulli(p) and Poisson(p)");
  for (double p : percent_grid()) {
    const auto j = joint_pmf(p, opts.tol);
    const auto table = hooked(opts, poisson_table(p, opts.tol));
    CompensatedSum b1;
    b1 += j.atom_01;
    for (double a : j.atoms_k1) b1 += a;
    b1 += j.tail_mass;
    c.expect(std::fabs(b1.value() - p) <= kExactSlack + opts.tol, describe({{"p", p}, {"P(b=1)", b1.value()}}));
    c.expect(std::fabs(j.atom_00 + j.atom_01 - table.pmf(0)) <= kExactSlack, describe({{"p", p}, {"l", 0}}));
    for (std::size_t k = 1; k <= j.atoms_k1.size(); ++k) {
      c.expect(std::fabs(j.atom_k1(k) - table.pmf(k)) <= kExactSlack,
               describe({{"p", p}, {"l", static_cast<double>(k)}}));
    }
  }
  return std::move(c).finish();
}

CheckResult check_mismatch_identity(const VerifyOptions& opts) {
  Check c("1 - mass(0) of L-B equals p(1 - e^{-p})");
  for (double p : percent_grid()) {
    const auto d = single_diff_distribution(p, opts.tol);
    const double lhs = 1.0 - d.mass(0);
    const double rhs = mismatch_probability_single(p);
    c.expect(std::fabs(lhs - rhs) <= kExactSlack + opts.tol, describe({{"p", p}, {"lhs", lhs}, {"rhs", rhs}}));
  }
  return std::move(c).finish();
}

CheckResult check_convolution(const VerifyOptions& opts) {
  Check c("n-fold convolution matches product-space enumeration");
  for (unsigned n = 1; n <= 4; ++n) {
    for (double p : {0.1, 0.3}) {
      const auto conv = nfold_diff_distribution(n, p, opts.tol);
      const auto brute = oracle::enumerate_diff_distribution(n, p, 14);
      const std::int64_t lo = -static_cast<std::int64_t>(n);
      const std::int64_t hi = std::max<std::int64_t>(conv.max_support(), lo + static_cast<std::int64_t>(brute.size()) - 1);
      double tv = 0.0;
      for (auto d = lo; d <= hi; ++d) {
        const auto i = static_cast<std::size_t>(d - lo);
        tv += std::fabs(conv.mass(d) - (i < brute.size() ? brute[i] : 0.0));
      }
      tv /= 2.0;
      c.expect(tv <= kConvolutionSlack, describe({{"n", n}, {"p", p}, {"tv", tv}}));
      c.expect(std::fabs(conv.mean()) <= kConvolutionSlack, describe({{"n", n}, {"p", p}, {"mean", conv.mean()}}));
    }
  }
  return std::move(c).finish();
}

CheckResult check_chain(const VerifyOptions& opts) {
  Check c("tv <= P(L!=B) <= E|L-B| <= np^2 on grid");
  for (unsigned n : kChainN) {
    for (double p : kChainP) {
      try {
        const auto r = bound_report(n, p, opts.tol);
        c.expect(r.tv_distance <= r.paper_bound, describe({{"n", n}, {"p", p}, {"tv", r.tv_distance}}));
      } catch (const InconsistencyError& e) {
        c.expect(false, e.what());
      }
    }
  }
  return std::move(c).finish();
}

CheckResult check_supremum(const VerifyOptions& opts) {
  Check c("exhaustive subset supremum over {0..12} is attained by D*");
  for (unsigned n = 1; n <= 3; ++n) {
    for (double p : {0.1, 0.5}) {
      const auto best = oracle::exhaustive_max_set_gap(n, p, 12);
      const auto worst = worst_case_set(n, p, opts.tol);
      const double tv = tv_distance(n, p, opts.tol);
      c.expect(std::fabs(best.gap - tv) <= kSupremumSlack,
               describe({{"n", n}, {"p", p}, {"exhaustive", best.gap}, {"tv", tv}}));
      c.expect(std::fabs(best.gap - worst.gap) <= kSupremumSlack,
               describe({{"n", n}, {"p", p}, {"exhaustive", best.gap}, {"D*", worst.gap}}));
    }
  }
  return std::move(c).finish();
}

CheckResult check_single_tv(const VerifyOptions& opts) {
  Check c("tv(n=1,p) equals p(1 - e^{-p}) on p grid");
  for (double p : percent_grid()) {
    const double tv = tv_distance(1, p, opts.tol);
    const double m = mismatch_probability_single(p);
    c.expect(std::fabs(tv - m) <= kSupremumSlack, describe({{"p", p}, {"tv", tv}, {"mismatch", m}}));
  }
  return std::move(c).finish();
}

CheckResult check_complement_symmetry(const VerifyOptions& opts) {
  Check c("set_gap(D) equals set_gap(complement of D)");
  const std::vector<SetSpec> sets = {
      SetSpec::explicit_set({0}),       SetSpec::explicit_set({1, 3, 4}), SetSpec::interval(2),
      SetSpec::interval(1, 5),          SetSpec::complement_of({0, 2}),   SetSpec::interval(0, 0),
  };
  for (unsigned n : {1U, 5U, 20U}) {
    for (double p : {0.05, 0.3}) {
      for (const auto& d : sets) {
        const double a = set_gap(n, p, d, opts.tol);
        const double b = set_gap(n, p, d.complement(), opts.tol);
        c.expect(std::fabs(a - b) <= kExactSlack + opts.tol,
                 describe({{"n", n}, {"p", p}}) + " D=" + d.to_string());
      }
    }
  }
  return std::move(c).finish();
}

}  // namespace

std::vector<std::string> poisson_table_violations(const PoissonPMFTable& table) {
  std::vector<std::string> out;
  const auto r = table.values();
  const auto s = table.partial_sums();
  const double rate = table.rate();
  if (r.empty() || r.size() != s.size()) {
    out.emplace_back("values and partial sums differ in length");
    return out;
  }
  CompensatedSum acc;
  for (std::size_t k = 0; k < r.size(); ++k) {
    if (!(r[k] >= 0.0 && r[k] <= 1.0)) out.push_back(describe({{"k", static_cast<double>(k)}, {"r_k", r[k]}}) + " outside [0,1]");
    if (k > 0 && s[k] < s[k - 1]) out.push_back(describe({{"k", static_cast<double>(k)}}) + " partial sums decrease");
    acc += r[k];
    if (std::fabs(acc.value() - s[k]) > 1e-14) {
      out.push_back(describe({{"k", static_cast<double>(k)}, {"s_k", s[k]}, {"sum", acc.value()}}) +
                    " partial sum disagrees with values");
    }
    if (k + 1 < r.size()) {
      const double lhs = r[k + 1] * static_cast<double>(k + 1);
      const double rhs = r[k] * rate;
      if (std::max(lhs, rhs) > 1e-290 && relative_gap(lhs, rhs) > 1e-12) {
        out.push_back(describe({{"k", static_cast<double>(k)}, {"lhs", lhs}, {"rhs", rhs}}) + " recurrence broken");
      }
    }
    if (k <= 40) {
      const double want = oracle::poisson_pmf(rate, k);
      if (want > 1e-290 && relative_gap(r[k], want) > 1e-10) {
        out.push_back(describe({{"k", static_cast<double>(k)}, {"r_k", r[k]}, {"direct", want}}) +
                      " disagrees with log-factorial evaluation");
      }
    }
  }
  if (table.tail_mass() > table.tolerance()) out.emplace_back("tail mass exceeds tolerance");
  const double missing = 1.0 - s.back();
  if (missing < -1e-14 || missing > table.tail_mass() + 1e-14) {
    out.push_back(describe({{"1-s_K", missing}, {"tail", table.tail_mass()}}) + " final partial sum off");
  }
  return out;
}

std::vector<CheckResult> run_verification(const VerifyOptions& opts) {
  if (!(opts.tol >= kMinFeasibleTol && opts.tol < 1e-6)) {
    std::ostringstream os;
    os.precision(3);
    os << "tolerance " << opts.tol << " is infeasible: must lie in [" << kMinFeasibleTol
       << ", 1e-06) (double-precision floor)";
    throw DomainError(os.str());
  }
  std::vector<CheckResult> results;
  results.push_back(check_poisson_tables(opts));
  results.push_back(check_binomial_tables());
  results.push_back(check_closed_form(opts));
  results.push_back(check_inequality_one());
  results.push_back(check_joint_marginals(opts));
  results.push_back(check_mismatch_identity(opts));
  results.push_back(check_convolution(opts));
  results.push_back(check_chain(opts));
  results.push_back(check_supremum(opts));
  results.push_back(check_single_tv(opts));
  results.push_back(check_complement_symmetry(opts));
  return results;
}

}  // namespace pcouple
