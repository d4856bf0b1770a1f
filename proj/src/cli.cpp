#include "poisson_couple/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "poisson_couple/approximation.hpp"
#include "poisson_couple/coupling.hpp"
#include "poisson_couple/errors.hpp"
#include "poisson_couple/monte_carlo.hpp"
#include "poisson_couple/rng.hpp"
#include "poisson_couple/verify.hpp"

#ifdef POISSON_COUPLE_FAULT_INJECTION
#include "poisson_couple/testing.hpp"
#endif

namespace pcouple::cli {

namespace {

using Json = nlohmann::ordered_json;

constexpr std::uint64_t kDefaultSeed = 20240601;
constexpr const char* kSeedEnv = "POISSON_COUPLE_SEED";

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class Format { Text, Csv, Json };

struct Common {
  std::optional<double> tol;
  std::string format;
  std::string out_path;
  bool no_banner = false;
};

std::string fmt(double x, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", digits, x);
  return buf;
}

// Human-facing tables.
std::string human(double x) { return fmt(x, 10); }
// Machine-facing CSV, lossless.
std::string machine(double x) { return fmt(x, 17); }

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string banner_line() { return std::string("# poisson-couple ") + kVersion + "\n"; }

Json json_header(const Common& c, const char* command) {
  Json j;
  j["schema_version"] = "1";
  j["command"] = command;
  if (!c.no_banner) j["generator"] = std::string("poisson-couple ") + kVersion;
  return j;
}

std::string render_json(const Json& j) { return j.dump(2) + "\n"; }

Format parse_format(const std::string& s, Format fallback) {
  if (s.empty()) return fallback;
  if (s == "csv") return Format::Csv;
  if (s == "json") return Format::Json;
  if (s == "text") return Format::Text;
  throw UsageError("--format must be one of csv, json, text; got '" + s + "'");
}

void require_p(double p) {
  if (!(p > 0.0 && p < 1.0)) throw UsageError("--p must lie in (0,1), got " + machine(p));
}

void require_n(long long n) {
  if (n < 1 || n > 100000000) throw UsageError("--n must be a positive integer, got " + std::to_string(n));
}

double resolve_tol(const Common& c, unsigned n, double p) {
  const double tol = c.tol.value_or(default_tolerance(n, p));
  if (!(tol > 0.0 && tol < 1.0)) throw UsageError("--tol must lie in (0,1), got " + machine(tol));
  return tol;
}

void emit(const Common& c, const std::string& text, std::ostream& out) {
  if (c.out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(c.out_path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open output file '" + c.out_path + "'");
  f << text;
  if (!f.flush()) throw IoError("failed writing output file '" + c.out_path + "'");
}

void add_common(CLI::App* sub, Common& c, bool with_tol = true) {
  if (with_tol) sub->add_option("--tol", c.tol, "Accuracy tolerance (default 1e-12, scaled up when np > 100)");
  sub->add_option("--format", c.format, "Output format: text, csv or json");
  sub->add_option("--out", c.out_path, "Write output to PATH instead of standard output");
  sub->add_flag("--no-banner", c.no_banner, "Omit the version banner");
}

const char* verdict(bool ok) { return ok ? "PASS" : "FAIL"; }

// ---------------------------------------------------------------- bound

int cmd_bound(const Common& c, long long n_arg, double p, std::ostream& out) {
  require_n(n_arg);
  require_p(p);
  const auto n = static_cast<unsigned>(n_arg);
  const double tol = resolve_tol(c, n, p);
  const auto r = compute_bound_report(n, p, tol);
  std::string text;
  switch (parse_format(c.format, Format::Text)) {
    case Format::Text: {
      std::ostringstream os;
      if (!c.no_banner) os << banner_line();
      auto row = [&](const char* name, const std::string& v) {
        os << name << std::string(24 - std::string(name).size(), ' ') << v << '\n';
      };
      row("n", std::to_string(r.n));
      row("p", human(r.p));
      row("tol", human(r.tol));
      row("tv_distance", human(r.tv_distance));
      row("worst_set_gap", human(r.worst_set_gap));
      row("mismatch_prob", human(r.mismatch_prob));
      row("expected_discrepancy", human(r.expected_discrepancy));
      row("markov_bound", human(r.markov_bound));
      row("paper_bound", human(r.paper_bound));
      row("tv <= mismatch", verdict(r.tv_le_mismatch()));
      row("mismatch <= E|L-B|", verdict(r.mismatch_le_markov()));
      row("E|L-B| <= np^2", verdict(r.markov_le_np2()));
      row("worst_set_gap == tv", verdict(r.gap_matches_tv()));
      text = os.str();
      break;
    }
    case Format::Csv: {
      std::ostringstream os;
      if (!c.no_banner) os << banner_line();
      os << "n,p,tol,tv,worst_set_gap,mismatch,e_disc,markov,np2,chain_ok\n";
      os << r.n << ',' << machine(r.p) << ',' << machine(r.tol) << ',' << machine(r.tv_distance) << ','
         << machine(r.worst_set_gap) << ',' << machine(r.mismatch_prob) << ',' << machine(r.expected_discrepancy)
         << ',' << machine(r.markov_bound) << ',' << machine(r.paper_bound) << ','
         << (r.consistent() ? "true" : "false") << '\n';
      text = os.str();
      break;
    }
    case Format::Json: {
      auto j = json_header(c, "bound");
      j["n"] = r.n;
      j["p"] = r.p;
      j["tol"] = r.tol;
      j["tv_distance"] = r.tv_distance;
      j["worst_set_gap"] = r.worst_set_gap;
      j["mismatch_prob"] = r.mismatch_prob;
      j["expected_discrepancy"] = r.expected_discrepancy;
      j["markov_bound"] = r.markov_bound;
      j["paper_bound"] = r.paper_bound;
      j["checks"] = {{"tv_le_mismatch", r.tv_le_mismatch()},
                     {"mismatch_le_expected_discrepancy", r.mismatch_le_markov()},
                     {"expected_discrepancy_le_np2", r.markov_le_np2()},
                     {"worst_set_gap_eq_tv", r.gap_matches_tv()}};
      text = render_json(j);
      break;
    }
  }
  emit(c, text, out);
  return r.consistent() ? kSuccess : kFailure;
}

// ---------------------------------------------------------------- tvd

int cmd_tvd(const Common& c, long long n_arg, double p, const std::optional<std::string>& set_text,
            std::ostream& out) {
  require_n(n_arg);
  require_p(p);
  const auto n = static_cast<unsigned>(n_arg);
  const double tol = resolve_tol(c, n, p);
  std::optional<SetSpec> d;
  if (set_text) d = SetSpec::parse(*set_text);

  const double tv = tv_distance(n, p, tol);
  const auto worst = worst_case_set(n, p, tol);
  const double np2 = static_cast<double>(n) * p * p;
  std::optional<double> gap;
  if (d) gap = set_gap(n, p, *d, tol);

  std::string text;
  switch (parse_format(c.format, Format::Text)) {
    case Format::Text: {
      std::ostringstream os;
      if (!c.no_banner) os << banner_line();
      os << "n          " << n << "\np          " << human(p) << "\ntv         " << human(tv)
         << "\nworst_set  " << worst.set.to_string() << "\nworst_gap  " << human(worst.gap) << "\nnp2        "
         << human(np2) << '\n';
      if (d) os << "set        " << d->to_string() << "\nset_gap    " << human(*gap) << '\n';
      text = os.str();
      break;
    }
    case Format::Csv: {
      std::ostringstream os;
      if (!c.no_banner) os << banner_line();
      os << "n,p,tv,worst_set,worst_gap,np2" << (d ? ",set,set_gap" : "") << '\n';
      os << n << ',' << machine(p) << ',' << machine(tv) << ',' << csv_field(worst.set.to_string()) << ','
         << machine(worst.gap) << ',' << machine(np2);
      if (d) os << ',' << csv_field(d->to_string()) << ',' << machine(*gap);
      os << '\n';
      text = os.str();
      break;
    }
    case Format::Json: {
      auto j = json_header(c, "tvd");
      j["n"] = n;
      j["p"] = p;
      j["tol"] = tol;
      j["tv_distance"] = tv;
      j["worst_set"] = worst.set.to_string();
      j["worst_gap"] = worst.gap;
      j["np2"] = np2;
      if (d) {
        j["set"] = d->to_string();
        j["set_gap"] = *gap;
      }
      text = render_json(j);
      break;
    }
  }
  emit(c, text, out);
  return kSuccess;
}

// ---------------------------------------------------------------- sweep

int cmd_sweep(const Common& c, std::vector<long long> ns, std::vector<double> ps, std::ostream& out) {
  if (ns.empty() || ps.empty()) throw UsageError("sweep needs non-empty --n and --p lists");
  for (auto n : ns) require_n(n);
  for (double p : ps) require_p(p);
  std::sort(ns.begin(), ns.end());
  ns.erase(std::unique(ns.begin(), ns.end()), ns.end());
  std::sort(ps.begin(), ps.end());
  ps.erase(std::unique(ps.begin(), ps.end()), ps.end());

  struct Row {
    unsigned n;
    double p, tv, mismatch, e_disc, np2, ratio;
  };
  std::vector<Row> rows;
  for (auto n_arg : ns) {
    const auto n = static_cast<unsigned>(n_arg);
    for (double p : ps) {
      const auto r = compute_bound_report(n, p, resolve_tol(c, n, p));
      rows.push_back({n, p, r.tv_distance, r.mismatch_prob, r.expected_discrepancy, r.paper_bound,
                      r.tv_distance / r.paper_bound});
    }
  }

  std::string text;
  const auto format = parse_format(c.format, Format::Csv);
  if (format == Format::Json) {
    auto j = json_header(c, "sweep");
    j["rows"] = Json::array();
    for (const auto& r : rows) {
      j["rows"].push_back({{"n", r.n}, {"p", r.p}, {"tv", r.tv}, {"mismatch", r.mismatch},
                           {"e_disc", r.e_disc}, {"np2", r.np2}, {"ratio", r.ratio}});
    }
    text = render_json(j);
  } else {
    const bool csv = format == Format::Csv;
    auto num = [&](double x) { return csv ? machine(x) : human(x); };
    std::ostringstream os;
    if (!c.no_banner) os << banner_line();
    os << "n,p,tv,mismatch,e_disc,np2,ratio\n";
    for (const auto& r : rows) {
      os << r.n << ',' << num(r.p) << ',' << num(r.tv) << ',' << num(r.mismatch) << ',' << num(r.e_disc) << ','
         << num(r.np2) << ',' << num(r.ratio) << '\n';
    }
    text = os.str();
  }
  emit(c, text, out);
  const bool ok = std::all_of(rows.begin(), rows.end(), [](const Row& r) { return r.tv <= r.np2; });
  return ok ? kSuccess : kFailure;
}

// ---------------------------------------------------------------- sample

std::uint64_t seed_from_env() {
  const char* env = std::getenv(kSeedEnv);
  if (!env || !*env) return kDefaultSeed;
  try {
    std::size_t used = 0;
    const auto v = std::stoull(env, &used, 0);
    if (used != std::string(env).size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw UsageError(std::string(kSeedEnv) + " is not an unsigned 64-bit integer: '" + env + "'");
  }
}

int cmd_sample(const Common& c, long long n_arg, double p, long long reps, std::optional<std::uint64_t> seed,
               std::optional<long long> streams_arg, bool emit_pairs, std::ostream& out) {
  require_n(n_arg);
  require_p(p);
  if (reps < 1) throw UsageError("--reps must be >= 1");
  SimConfig cfg;
  cfg.n = static_cast<unsigned>(n_arg);
  cfg.p = p;
  cfg.reps = static_cast<std::uint64_t>(reps);
  cfg.seed = seed ? *seed : seed_from_env();
  if (streams_arg) {
    if (*streams_arg < 1 || *streams_arg > reps) {
      throw UsageError("--streams must lie in [1, reps], got " + std::to_string(*streams_arg));
    }
    cfg.streams = static_cast<unsigned>(*streams_arg);
  } else {
    const auto hw = std::max(1U, std::thread::hardware_concurrency());
    cfg.streams = static_cast<unsigned>(std::min<std::uint64_t>(hw, cfg.reps));
  }
  // Raw pairs go to --out when given, otherwise ahead of the summaries.
  const bool keep_pairs = emit_pairs || !c.out_path.empty();
  const auto est = simulate_coupled(cfg, keep_pairs);
  const auto format = parse_format(c.format, Format::Text);

  std::ostringstream pairs_csv;
  if (keep_pairs && format != Format::Json) {
    pairs_csv << "l_sum,b_sum\n";
    for (const auto& s : est.pairs) pairs_csv << s.l_sum << ',' << s.b_sum << '\n';
  }

  std::ostringstream os;
  if (format == Format::Json) {
    auto j = json_header(c, "sample");
    j["config"] = {{"n", cfg.n}, {"p", cfg.p}, {"reps", cfg.reps}, {"seed", cfg.seed}, {"streams", cfg.streams},
                   {"rng", std::string(CounterRng::kName)}};
    j["estimates"] = Json::array();
    for (const auto* e : {&est.discrepancy, &est.mismatch}) {
      j["estimates"].push_back({{"statistic", e->statistic_name}, {"mean", e->mean}, {"std_error", e->std_error},
                                {"reps", e->reps}, {"degenerate", e->degenerate}});
    }
    if (keep_pairs) {
      j["pairs"] = Json::array();
      for (const auto& s : est.pairs) j["pairs"].push_back({s.l_sum, s.b_sum});
    }
    emit(c, render_json(j), out);
    return kSuccess;
  }

  if (!c.no_banner) os << banner_line();
  if (emit_pairs && c.out_path.empty()) os << pairs_csv.str();
  if (format == Format::Csv) {
    os << "statistic,mean,std_error,reps,seed,streams,rng,degenerate\n";
    for (const auto* e : {&est.discrepancy, &est.mismatch}) {
      os << e->statistic_name << ',' << machine(e->mean) << ',' << machine(e->std_error) << ',' << e->reps << ','
         << e->seed << ',' << e->streams << ',' << e->rng_name << ',' << (e->degenerate ? "true" : "false")
         << '\n';
    }
  } else {
    os << "# n=" << cfg.n << " p=" << human(cfg.p) << " reps=" << cfg.reps << " seed=" << cfg.seed
       << " streams=" << cfg.streams << " rng=" << CounterRng::kName << '\n';
    for (const auto* e : {&est.discrepancy, &est.mismatch}) {
      os << e->statistic_name << ": mean=" << human(e->mean) << " std_error=" << human(e->std_error)
         << " reps=" << e->reps << (e->degenerate ? " (degenerate: single replication)" : "") << '\n';
    }
  }
  out << os.str();
  if (!c.out_path.empty()) emit(c, pairs_csv.str(), out);
  return kSuccess;
}

// ---------------------------------------------------------------- joint

int cmd_joint(const Common& c, double p, std::ostream& out) {
  require_p(p);
  const double tol = resolve_tol(c, 1, p);
  const auto j = joint_pmf(p, tol);
  std::string text;
  switch (parse_format(c.format, Format::Text)) {
    case Format::Text:
    case Format::Csv: {
      const bool csv = parse_format(c.format, Format::Text) == Format::Csv;
      auto num = [&](double x) { return csv ? machine(x) : human(x); };
      std::ostringstream os;
      if (!c.no_banner) os << banner_line();
      os << "l,b,mass\n0,0," << num(j.atom_00) << "\n0,1," << num(j.atom_01) << '\n';
      for (std::size_t k = 1; k <= j.atoms_k1.size(); ++k) os << k << ",1," << num(j.atom_k1(k)) << '\n';
      if (!csv) {
        os << "# tail_mass=" << human(j.tail_mass) << " e_disc=" << human(expected_discrepancy_single(p))
           << " mismatch=" << human(mismatch_probability_single(p)) << '\n';
      }
      text = os.str();
      break;
    }
    case Format::Json: {
      auto o = json_header(c, "joint");
      o["p"] = p;
      o["tol"] = tol;
      o["atom_00"] = j.atom_00;
      o["atom_01"] = j.atom_01;
      o["atoms_k1"] = j.atoms_k1;
      o["truncation_index"] = j.truncation_index;
      o["tail_mass"] = j.tail_mass;
      o["expected_discrepancy"] = expected_discrepancy_single(p);
      o["mismatch_prob"] = mismatch_probability_single(p);
      text = render_json(o);
      break;
    }
  }
  emit(c, text, out);
  return kSuccess;
}

// ---------------------------------------------------------------- verify

int cmd_verify(const Common& c, bool inject_fault, std::ostream& out) {
  VerifyOptions opts;
  opts.tol = c.tol.value_or(1e-12);
#ifdef POISSON_COUPLE_FAULT_INJECTION
  if (inject_fault) {
    opts.table_hook = [](PoissonPMFTable t) {
      const double bumped = t.values()[1] * 1.01;
      return testing::FaultInjector::corrupt_value(std::move(t), 1, bumped);
    };
  }
#else
  (void)inject_fault;
#endif
  std::vector<CheckResult> results;
  try {
    results = run_verification(opts);
  } catch (const DomainError& e) {
    throw UsageError(e.what());
  }
  const auto passed = std::count_if(results.begin(), results.end(), [](const auto& r) { return r.passed; });
  const bool ok = passed == static_cast<long>(results.size());

  std::string text;
  const auto format = parse_format(c.format, Format::Text);
  if (format == Format::Json) {
    auto j = json_header(c, "verify");
    j["tol"] = opts.tol;
    j["checks"] = Json::array();
    for (const auto& r : results) j["checks"].push_back({{"name", r.name}, {"passed", r.passed}, {"detail", r.detail}});
    j["passed"] = ok;
    text = render_json(j);
  } else if (format == Format::Csv) {
    std::ostringstream os;
    if (!c.no_banner) os << banner_line();
    os << "check,verdict,detail\n";
    for (const auto& r : results) os << csv_field(r.name) << ',' << verdict(r.passed) << ',' << csv_field(r.detail) << '\n';
    text = os.str();
  } else {
    std::ostringstream os;
    if (!c.no_banner) os << banner_line();
    for (const auto& r : results) {
      os << verdict(r.passed) << "  " << r.name;
      if (!r.passed) os << "\n      " << r.detail;
      os << '\n';
    }
    os << "verify: " << passed << '/' << results.size() << " checks passed\n";
    text = os.str();
  }
  emit(c, text, out);
  return ok ? kSuccess : kFailure;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Coupling of Binomial(n,p) and Poisson(np) with exact and simulated error bounds",
               "poisson-couple"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  Common common;
  long long n = 0;
  double p = 0.0;
  std::vector<long long> n_list;
  std::vector<double> p_list;
  long long reps = 1000000;
  std::optional<std::uint64_t> seed;
  std::optional<long long> streams;
  std::optional<std::string> set_text;
  bool emit_pairs = false;
  bool inject_fault = false;

  auto* bound = app.add_subcommand("bound", "Report every link of the error-bound chain for one (n,p)");
  bound->add_option("--n", n, "Number of trials")->required();
  bound->add_option("--p", p, "Success probability in (0,1)")->required();
  add_common(bound, common);

  auto* tvd = app.add_subcommand("tvd", "Total variation distance, worst-case set and optional set gap");
  tvd->add_option("--n", n, "Number of trials")->required();
  tvd->add_option("--p", p, "Success probability in (0,1)")->required();
  tvd->add_option("--set", set_text, "Set D: '0,2,5', '3..', '3..7' or '!0,1'");
  add_common(tvd, common);

  auto* sweep = app.add_subcommand("sweep", "Grid of bound reports, one row per (n,p)");
  sweep->add_option("--n", n_list, "Comma-separated trial counts")->required()->delimiter(',');
  sweep->add_option("--p", p_list, "Comma-separated probabilities")->required()->delimiter(',');
  add_common(sweep, common);

  auto* sample = app.add_subcommand("sample", "Simulate the coupled sums and estimate E|L-B| and P(L!=B)");
  sample->add_option("--n", n, "Number of trials")->required();
  sample->add_option("--p", p, "Success probability in (0,1)")->required();
  sample->add_option("--reps", reps, "Replications (default 1000000)");
  sample->add_option("--seed", seed, "RNG seed (default from POISSON_COUPLE_SEED)");
  sample->add_option("--streams", streams, "Parallel RNG streams (default: available parallelism)");
  sample->add_flag("--emit-pairs", emit_pairs, "Print the raw (l_sum, b_sum) pairs as CSV");
  add_common(sample, common, false);

  auto* joint = app.add_subcommand("joint", "Exact joint pmf of the single-component coupling");
  joint->add_option("--p", p, "Success probability in (0,1)")->required();
  add_common(joint, common);

  auto* verify = app.add_subcommand("verify", "Run every invariant grid and report pass/fail per check");
  add_common(verify, common);
#ifdef POISSON_COUPLE_FAULT_INJECTION
  verify->add_flag("--inject-fault", inject_fault, "Corrupt the Poisson tables under test");
#endif

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kSuccess : kUsage;
  }

  try {
    if (*bound) return cmd_bound(common, n, p, out);
    if (*tvd) return cmd_tvd(common, n, p, set_text, out);
    if (*sweep) return cmd_sweep(common, n_list, p_list, out);
    if (*sample) return cmd_sample(common, n, p, reps, seed, streams, emit_pairs, out);
    if (*joint) return cmd_joint(common, p, out);
    if (*verify) return cmd_verify(common, inject_fault, out);
  } catch (const UsageError& e) {
    err << "poisson-couple: " << e.what() << '\n';
    return kUsage;
  } catch (const DomainError& e) {
    err << "poisson-couple: " << e.what() << '\n';
    return kUsage;
  } catch (const std::exception& e) {
    err << "poisson-couple: " << e.what() << '\n';
    return kFailure;
  }
  return kUsage;
}

}  // namespace pcouple::cli
