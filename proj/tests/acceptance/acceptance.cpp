// Acceptance run: one line per criterion. Exit status is nonzero only when a
// gating criterion fails; --extended also runs the long table rows.
#include <chrono>
#include <cstring>
#include <functional>
#include <iomanip>
#include <iostream>
#include <sstream>
#include <thread>

#include "seqlab/construct.hpp"
#include "seqlab/errors.hpp"
#include "seqlab/json_io.hpp"
#include "seqlab/poly/coefficient.hpp"
#include "seqlab/poly/families.hpp"
#include "seqlab/poly/tables.hpp"
#include "seqlab/rng.hpp"
#include "seqlab/search.hpp"

using namespace seqlab;
using io::json;

namespace {

struct Outcome {
  std::string status;  // PASS, FAIL, PARTIAL, SKIP, INFO
  std::string detail;
  json report;          // compared across runs for determinism
};

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::string fmt(double v, int digits = 2) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(digits) << v;
  return s.str();
}

bool sound(const Group& g, const std::vector<Element>& items, std::size_t t) {
  const Ordering ord(g, items);
  return check_t_weak(ord, t).empty() && is_alternating(ord).alternating;
}

// ---- 1, 2 ------------------------------------------------------------------

Outcome tables_required() {
  int rows = 0, ok = 0;
  double slowest10 = 0, slowest12 = 0;
  std::string bad;
  for (int table : {1, 2}) {
    for (int k : {4, 6, 8, 10, 12}) {
      for (const auto& row : poly::find_rows(table, k)) {
        ++rows;
        const auto t0 = std::chrono::steady_clock::now();
        const auto rep = poly::verify_table_row(row);
        const double s = seconds_since(t0);
        (k <= 10 ? slowest10 : slowest12) = std::max(k <= 10 ? slowest10 : slowest12, s);
        if (rep.passed() && rep.result.coefficient.exact) {
          ++ok;
        } else {
          bad += " T" + std::to_string(table) + "/k=" + std::to_string(k);
        }
      }
    }
  }
  const bool pass = ok == rows && slowest10 < 60 && slowest12 < 3600;
  return {pass ? "PASS" : "FAIL",
          std::to_string(ok) + "/" + std::to_string(rows) + " rows exact with sign; slowest k<=10 " + fmt(slowest10) +
              " s, k=12 " + fmt(slowest12) + " s" + (bad.empty() ? "" : "; mismatched:" + bad),
          {}};
}

Outcome tables_extended(bool enabled) {
  if (!enabled) return {"SKIP", "not gating; run with --extended (k = 14, 16 and Tables 3-6 modulo 3 primes)", {}};
  poly::ExtractOptions opts;
  opts.mod_primes = poly::default_primes(3);
  opts.reconstruct = true;
  opts.jobs = std::max(1u, std::thread::hardware_concurrency());
  int rows = 0, ok = 0, capped = 0;
  std::string lines;
  const auto t_all = std::chrono::steady_clock::now();
  for (int table = 1; table <= 6; ++table) {
    for (const auto& row : poly::find_rows(table)) {
      if (table <= 2 && row.k_or_ell < 14) continue;
      ++rows;
      const auto t0 = std::chrono::steady_clock::now();
      std::string status;
      try {
        const auto rep = poly::verify_table_row(row, opts);
        status = rep.passed() ? "match" : "MISMATCH";
        ok += rep.passed();
      } catch (const ResourceCapExceeded& e) {
        status = "cap exceeded (peak " + std::to_string(e.frontier_peak()) + ")";
        ++capped;
      }
      std::cerr << "  table " << table << " k/ell=" << row.k_or_ell << ": " << status << " in " << fmt(seconds_since(t0), 1)
                << " s\n";
    }
  }
  lines = std::to_string(ok) + "/" + std::to_string(rows) + " rows match modulo 3 primes (CRT value compared)";
  if (capped) lines += ", " + std::to_string(capped) + " hit the frontier cap";
  lines += "; total " + fmt(seconds_since(t_all), 0) + " s";
  return {ok == rows ? "PASS" : "FAIL", lines, {}};
}

// ---- 3 ---------------------------------------------------------------------

Outcome oracle_equivalence() {
  Rng rng(20240611);
  int products = 0, checks = 0, disagreements = 0;
  const auto t0 = std::chrono::steady_clock::now();
  for (; products < 200; ++products) {
    const auto vars = static_cast<std::uint32_t>(1 + rng.below(6));
    const auto nf = static_cast<std::size_t>(1 + rng.below(10));
    poly::FormProduct p(vars);
    while (p.total_degree() < nf) {
      poly::LinearForm f;
      for (std::uint32_t v = 0; v < vars; ++v) {
        const auto c = static_cast<std::int64_t>(rng.below(7)) - 3;
        if (c != 0) f.terms.push_back({v, c});
      }
      if (!f.terms.empty()) p.add_factor(f);
    }
    for (int m = 0; m < 20; ++m) {
      poly::Monomial mono{std::vector<std::uint32_t>(vars, 0)};
      for (std::size_t d = 0; d < nf; ++d) ++mono.exponents[rng.below(vars)];
      std::optional<mpz_class> first;
      for (auto s : {poly::Strategy::prune, poly::Strategy::mitm, poly::Strategy::naive}) {
        poly::ExtractOptions o;
        o.strategy = s;
        const auto v = *poly::coefficient(p, mono, o).coefficient.value;
        if (!first) first = v;
        else if (*first != v) ++disagreements;
      }
      ++checks;
    }
  }
  const double s = seconds_since(t0);
  return {disagreements == 0 && s < 60 ? "PASS" : "FAIL",
          std::to_string(products) + " products x 20 monomials, prune = mitm = naive in " + std::to_string(checks - disagreements) +
              "/" + std::to_string(checks) + " cases, " + fmt(s) + " s",
          {}};
}

// ---- 4 ---------------------------------------------------------------------

const std::vector<std::pair<std::string, std::uint64_t>> kBaseGroups = {
    {"dihedral:10", 5}, {"dihedral:14", 525}, {"dihedral:22", 69300},
    {"zpxz2:5", 5},     {"zpxz2:7", 525},     {"zpxz2:11", 69300}};

Outcome base_case(unsigned jobs) {
  json reports = json::array();
  bool pass = true;
  double slowest = 0;
  std::string detail;
  for (const auto& [spec, expected] : kBaseGroups) {
    const Group g = parse_group_spec(spec);
    VerifyAllOptions o;
    o.t = 4;
    o.cls = OrderingClass::alternating;
    o.jobs = jobs;
    const auto rep = verify_all(g, 8, o);
    slowest = std::max(slowest, rep.elapsed_ms / 1000);
    const bool ok = rep.failures.empty() && rep.subsets_checked == expected && rep.subsets_total == expected;
    pass = pass && ok;
    detail += (detail.empty() ? "" : ", ") + spec + " " + std::to_string(rep.subsets_checked) + (ok ? "" : " (FAILED)");
    auto j = io::to_json(rep, g);
    j.erase("jobs");
    reports.push_back(j);
  }
  return {pass && slowest < 600 ? "PASS" : "FAIL", "zero failures over " + detail + "; slowest " + fmt(slowest) + " s",
          reports};
}

// ---- 5, 6, 7 ---------------------------------------------------------------

SubsetCheck t3_check() {
  return [](const Group& g, std::span<const Element> s) {
    try {
      return sound(g, sequence_t3_alternating(g, s).items, 3);
    } catch (const std::exception&) {
      return false;
    }
  };
}

Outcome t3_soundness() {
  json reports = json::array();
  std::uint64_t checked = 0, failures = 0;
  const auto t0 = std::chrono::steady_clock::now();
  auto run = [&](const std::string& spec, std::size_t k, std::optional<std::uint64_t> sample) {
    const Group g = parse_group_spec(spec);
    VerifyAllOptions o;
    o.t = 3;
    o.sample = sample;
    o.seed = 5;
    const auto rep = verify_all(g, k, o, t3_check(), "sequence_t3_alternating");
    checked += rep.subsets_checked;
    failures += rep.failures.size();
    reports.push_back(io::to_json(rep, g));
  };
  for (const auto* spec : {"zpxz2:5", "zpxz2:7", "dihedral:10", "dihedral:14"})
    for (std::size_t k : {4, 6}) run(spec, k, std::nullopt);
  for (std::size_t k : {8, 12, 20}) run("dihedral:46", k, 1000);
  const double s = seconds_since(t0);
  return {failures == 0 && s < 300 ? "PASS" : "FAIL",
          std::to_string(checked) + " subsets (exhaustive k = 4, 6; 3 x 1000 sampled in dihedral:46), " +
              std::to_string(failures) + " failures, " + fmt(s) + " s",
          reports};
}

Outcome t4_soundness() {
  const Group g = parse_group_spec("dihedral:46");
  VerifyAllOptions o;
  o.t = 4;
  o.sample = 100;
  o.seed = 6;
  const auto rep = verify_all(
      g, 18, o,
      [](const Group& grp, std::span<const Element> s) {
        try {
          return sound(grp, sequence_t4_alternating(grp, s).items, 4);
        } catch (const std::exception&) {
          return false;
        }
      },
      "sequence_t4_alternating");
  return {rep.failures.empty() && rep.subsets_checked == 100 ? "PASS" : "FAIL",
          std::to_string(rep.subsets_checked) + " sampled k = 18 subsets of dihedral:46, " +
              std::to_string(rep.failures.size()) + " failures",
          json::array({io::to_json(rep, g)})};
}

Outcome theorem_spot_check() {
  json reports = json::array();
  std::uint64_t checked = 0, failures = 0;
  for (const auto* spec : {"zpxz2:5", "dihedral:10"}) {
    const Group g = parse_group_spec(spec);
    for (std::size_t k : {4, 6}) {
      VerifyAllOptions o;
      o.t = std::min<std::size_t>(8, k - 1);
      const auto rep = verify_all(g, k, o);
      checked += rep.subsets_checked;
      failures += rep.failures.size();
      reports.push_back(io::to_json(rep, g));
    }
  }
  return {failures == 0 ? "PASS" : "FAIL",
          std::to_string(checked) + " subsets with t = min(8, k-1), " + std::to_string(failures) + " failures", reports};
}

// ---- 8 ---------------------------------------------------------------------

Outcome estimator_consistency() {
  json reports = json::array();
  int realized = 0, within = 0, total = 0;
  std::string missing;
  for (const auto* spec : {"dihedral:46", "zpxz2:23"}) {
    const Group g = parse_group_spec(spec);
    for (auto variant : {BoundVariant::plain, BoundVariant::balanced}) {
      for (std::size_t t : {2, 3, 4}) {
        for (std::size_t ell : {20, 50}) {
          ++total;
          const auto attempt = make_estimate_instance(g, t, ell, variant, 8);
          json j = {{"group", spec}, {"variant", to_string(variant)}, {"t", t}, {"ell", ell}};
          const auto bound = bound_E({static_cast<int>(t), static_cast<std::int64_t>(ell), variant});
          j["bound"] = bound.get_str();
          if (!attempt.instance) {
            j["realized"] = false;
            j["best_reserved"] = attempt.best_reserved;
            j["reason"] = attempt.reason;
            missing += std::string(missing.empty() ? "" : "; ") + spec + " " + to_string(variant) + " t=" +
                       std::to_string(t) + " l=" + std::to_string(ell) +
                       (attempt.attempts == 0 ? std::string(" (too few elements)")
                                              : " (largest T found: " + std::to_string(attempt.best_reserved) + ")");
            reports.push_back(j);
            continue;
          }
          ++realized;
          const auto& inst = *attempt.instance;
          const auto est = estimate_collision_expectation(g, inst.set, inst.reserved, inst.prefix, t, 10000, 88,
                                                          variant, 1);
          const bool ok = est.mean <= bound.get_d() + 3 * est.std_error;
          within += ok;
          j["realized"] = true;
          j["estimate"] = io::to_json(est);
          j["within_bound"] = ok;
          reports.push_back(j);
        }
      }
    }
  }
  bool below_one = true;
  for (int t = 1; t <= 8; ++t) below_one = below_one && bound_E({t, 1'000'000, BoundVariant::plain}) < 1;

  std::string detail = std::to_string(within) + "/" + std::to_string(realized) + " realized configurations within bound + 3 SE; " +
                       std::to_string(total - realized) + "/" + std::to_string(total) +
                       " unattainable (no zero-sum-free T of size ell found, or S would exceed the group): " + missing +
                       "; bound_E(plain, t <= 8, 10^6) < 1: " + (below_one ? "yes" : "NO");
  std::string status = "PASS";
  if (within != realized || !below_one) status = "FAIL";
  else if (realized < total) status = "PARTIAL";
  return {status, detail, reports};
}

}  // namespace

int main(int argc, char** argv) {
  bool extended = false;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--extended") == 0) extended = true;
    else {
      std::cerr << "usage: seqlab_acceptance [--extended]\n";
      return 2;
    }
  }
  const unsigned jobs = 4;
  bool gating_ok = true;
  auto line = [&](int id, const std::string& name, const Outcome& o, bool gating = true) {
    std::cout << "criterion " << id << " [" << o.status << "] " << name << ": " << o.detail << std::endl;
    if (gating && o.status == "FAIL") gating_ok = false;
  };

  line(1, "table reproduction (required)", tables_required());
  line(2, "table reproduction (extended, not gating)", tables_extended(extended), false);
  line(3, "oracle equivalence", oracle_equivalence());
  const auto c4 = base_case(jobs);
  line(4, "k = 8 base case", c4);
  const auto c5 = t3_soundness();
  line(5, "t = 3 constructor soundness", c5);
  const auto c6 = t4_soundness();
  line(6, "t = 4 constructor soundness", c6);
  const auto c7 = theorem_spot_check();
  line(7, "theorem spot-check by search", c7);
  const auto c8 = estimator_consistency();
  line(8, "bound/estimator consistency", c8);

  // 9: rerun 4-8 with the same seeds; also 4 with one job.
  auto strip = [](json j) {
    io::strip_timing(j);
    return j.dump();
  };
  const json first = {c4.report, c5.report, c6.report, c7.report, c8.report};
  const json second = {base_case(jobs).report, t3_soundness().report, t4_soundness().report,
                       theorem_spot_check().report, estimator_consistency().report};
  const bool same = strip(first) == strip(second);
  const bool jobs_same = strip(c4.report) == strip(base_case(1).report);
  line(9, "determinism",
       {same && jobs_same ? "PASS" : "FAIL",
        std::string("reports of 4-8 ") + (same ? "byte-identical" : "DIFFER") + " on rerun (timing excluded); jobs=1 vs jobs=" +
            std::to_string(jobs) + " " + (jobs_same ? "identical" : "DIFFER"),
        {}});
  return gating_ok ? 0 : 1;
}
