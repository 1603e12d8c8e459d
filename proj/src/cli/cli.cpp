#include "seqlab/cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "seqlab/construct.hpp"
#include "seqlab/errors.hpp"
#include "seqlab/json_io.hpp"
#include "seqlab/poly/coefficient.hpp"
#include "seqlab/poly/families.hpp"
#include "seqlab/poly/tables.hpp"
#include "seqlab/search.hpp"

namespace seqlab::cli {

namespace {

using io::json;

// Exit codes.
constexpr int kOk = 0;
constexpr int kFalse = 1;
constexpr int kError = 2;

unsigned default_jobs() { return std::max(1u, std::thread::hardware_concurrency()); }

json read_json_text(const std::string& text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw PreconditionError("cannot parse " + what + " as JSON: " + e.what());
  }
}

std::string slurp(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw PreconditionError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Inline literal, or the whole --file when the literal is absent.
json input_json(const std::string& literal, const std::string& file, const std::string& what) {
  if (!literal.empty()) return read_json_text(literal, what);
  if (!file.empty()) return read_json_text(slurp(file), file);
  throw PreconditionError("give --" + what + " or --file");
}

std::string join_elements(const Group& g, std::span<const Element> items) {
  std::string s;
  for (const auto& e : items) {
    if (!s.empty()) s += ' ';
    s += to_string(e, g.has_parity());
  }
  return s;
}

struct Common {
  std::string group;
  std::size_t t = 1;
  bool alternating = false;
  unsigned jobs = default_jobs();
  std::string file;
  std::string format = "json";
};

// Reports always carry a seed; null for commands that use no randomness.
void emit(std::ostream& out, json j) {
  if (j.contains("command") && !j.contains("seed")) j["seed"] = nullptr;
  out << j.dump(2) << '\n';
}

// ---- verify ----------------------------------------------------------------

struct VerifyArgs {
  Common c;
  std::string ordering;
};

int cmd_verify(const VerifyArgs& a, std::ostream& out) {
  const Group g = parse_group_spec(a.c.group);
  const auto items = io::elements_from_json(g, input_json(a.ordering, a.c.file, "ordering"));
  const Ordering ord(g, items);
  json r = {{"command", "verify"}, {"group", g.description()}, {"ordering", io::to_json(g, ord.items())}};
  r["partial_sums"] = io::to_json(g, partial_sums(ord));
  r.update(io::verification_json(ord, a.c.t, a.c.alternating));
  emit(out, r);
  return r["valid"].get<bool>() ? kOk : kFalse;
}

// ---- construct -------------------------------------------------------------

struct ConstructArgs {
  Common c;
  std::string set;
  std::string method = "t3";
  std::size_t h = 0;
  std::size_t max_size = 0;
  std::optional<std::uint64_t> seed;
};

json extracted_json(const Group& g, const ExtractedSubset& x) {
  json cert = json::array();
  for (const auto& s : x.certificate) cert.push_back(io::to_json(g, s));
  json r = {{"subset", io::to_json(g, x.subset)}, {"certificate_size", x.certificate.size()}, {"certificate", cert}};
  if (g.has_parity()) r["type"] = {x.type.lambda0, x.type.lambda1};
  return r;
}

int cmd_construct(const ConstructArgs& a, std::ostream& out) {
  const Group g = parse_group_spec(a.c.group);
  const auto set = io::elements_from_json(g, input_json(a.set, a.c.file, "set"));
  json r = {{"command", "construct"}, {"group", g.description()}, {"method", a.method}};
  r["seed"] = a.seed ? json(*a.seed) : json(nullptr);
  ConstructOptions opts{a.seed};

  auto sequenced = [&](std::vector<Element> items, std::size_t t, bool alt, const std::vector<std::string>& notes) {
    const Ordering ord(g, std::move(items));
    r["t"] = t;
    r["ordering"] = io::to_json(g, ord.items());
    r["notes"] = notes;
    r["verification"] = io::verification_json(ord, t, alt);
    emit(out, r);
    return r["verification"]["valid"].get<bool>() ? kOk : kFalse;
  };

  try {
    if (a.method == "t3") {
      const auto c = sequence_t3_alternating(g, set, opts);
      return sequenced(c.items, 3, true, c.notes);
    }
    if (a.method == "t4") {
      const auto c = sequence_t4_alternating(g, set);
      return sequenced(c.items, 4, true, c.notes);
    }
    if (a.method == "prefix" || a.method == "prefix-alternating") {
      const bool alt = a.method == "prefix-alternating";
      const auto p = alt ? greedy_prefix_alternating(g, set, a.h, a.c.t, opts) : greedy_prefix(g, set, a.h, a.c.t, opts);
      r["h"] = a.h;
      r["remainder"] = io::to_json(g, p.remainder);
      return sequenced(p.prefix, a.c.t, alt, {});
    }
    if (a.method == "extract-t23" || a.method == "extract-t32" || a.method == "zero-sum-free") {
      ExtractedSubset x;
      if (a.method == "extract-t23") {
        x = extract_T23(g, set);
      } else if (a.method == "extract-t32") {
        x = extract_T32(g, set);
      } else {
        r["t"] = a.c.t;
        r["ordering_class"] = a.c.alternating ? "alternating" : "any";
        const std::size_t cap = a.max_size ? a.max_size : set.size();
        x = extract_zero_sum_free(g, set, cap, a.c.t,
                                  a.c.alternating ? OrderingClass::alternating : OrderingClass::any, a.seed);
      }
      r.update(extracted_json(g, x));
      emit(out, r);
      return kOk;
    }
  } catch (const InternalContradiction& e) {
    r["error"] = e.what();
    r["kind"] = "internal_contradiction";
    emit(out, r);
    return kFalse;
  }
  throw PreconditionError("unknown construct method " + a.method);
}

// ---- search ----------------------------------------------------------------

struct SearchArgs {
  Common c;
  std::string set;
  int start_parity = -1;
};

int cmd_search(const SearchArgs& a, std::ostream& out) {
  const Group g = parse_group_spec(a.c.group);
  const auto set = io::elements_from_json(g, input_json(a.set, a.c.file, "set"));
  const auto start = std::chrono::steady_clock::now();
  std::optional<std::uint8_t> sp;
  if (a.start_parity >= 0) sp = static_cast<std::uint8_t>(a.start_parity);
  const auto found = find_sequencing_backtrack(g, set, a.c.t, a.c.alternating ? OrderingClass::alternating : OrderingClass::any, sp);
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  json r = {{"command", "search"},
            {"group", g.description()},
            {"t", a.c.t},
            {"ordering_class", a.c.alternating ? "alternating" : "any"},
            {"set", io::to_json(g, set)},
            {"found", found.has_value()}};
  r["ordering"] = found ? io::to_json(g, found->items()) : json(nullptr);
  r["verification"] = found ? io::verification_json(*found, a.c.t, a.c.alternating) : json(nullptr);
  r["elapsed_ms"] = static_cast<std::int64_t>(ms);
  emit(out, r);
  return found ? kOk : kFalse;
}

// ---- verify-all ------------------------------------------------------------

struct VerifyAllArgs {
  Common c;
  std::size_t k = 0;
  std::uint64_t cap = kDefaultEnumerationCap;
  std::uint64_t sample = 0;
  std::uint64_t seed = 0;
};

int cmd_verify_all(const VerifyAllArgs& a, std::ostream& out) {
  const Group g = parse_group_spec(a.c.group);
  VerifyAllOptions o;
  o.t = a.c.t;
  o.cls = a.c.alternating ? OrderingClass::alternating : OrderingClass::any;
  o.jobs = a.c.jobs;
  o.cap = a.cap;
  o.seed = a.seed;
  if (a.sample > 0) o.sample = a.sample;

  if (a.c.format == "csv") {
    // One row per subset, ordered by the canonical subset list (= rank order).
    std::mutex mu;
    std::map<std::vector<Element>, std::string> rows;
    auto check = [&](const Group& grp, std::span<const Element> s) {
      const auto found = find_sequencing_backtrack(grp, s, o.t, o.cls);
      std::string row = join_elements(grp, s) + "," + (found ? "1" : "0") + "," +
                        (found ? join_elements(grp, found->items()) : std::string());
      std::lock_guard lock(mu);
      rows.emplace(std::vector<Element>(s.begin(), s.end()), std::move(row));
      return found.has_value();
    };
    const auto report = verify_all(g, a.k, o, check);
    out << "subset,sequenced,ordering\n";
    for (const auto& [key, row] : rows) out << row << '\n';
    return report.failures.empty() ? kOk : kFalse;
  }
  const auto report = verify_all(g, a.k, o);
  json r = {{"command", "verify-all"}};
  r.update(io::to_json(report, g));
  emit(out, r);
  return report.failures.empty() ? kOk : kFalse;
}

// ---- coeff -----------------------------------------------------------------

struct PolyArgs {
  std::string strategy = "auto";
  std::size_t primes = 0;
  std::string mod_primes;
  bool reconstruct = false;
  bool bigint = false;
  std::size_t frontier_cap = poly::frontier_cap_from_env();
  unsigned jobs = default_jobs();
};

poly::ExtractOptions extract_options(const PolyArgs& a) {
  poly::ExtractOptions o;
  o.strategy = poly::parse_strategy(a.strategy);
  o.bigint = a.bigint;
  o.frontier_cap = a.frontier_cap;
  o.jobs = a.jobs;
  if (!a.mod_primes.empty()) {
    std::stringstream ss(a.mod_primes);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        o.mod_primes.push_back(std::stoull(item));
      } catch (const std::exception&) {
        throw PreconditionError("bad prime '" + item + "'");
      }
    }
  } else if (a.primes > 0) {
    o.mod_primes = poly::default_primes(a.primes);
  }
  o.reconstruct = a.reconstruct;
  return o;
}

json coefficient_json(const poly::ExtractResult& res, const poly::Monomial& m) {
  const auto& c = res.coefficient;
  json residues = json::object();
  for (const auto& r : c.residues) residues[std::to_string(r.prime)] = std::to_string(r.value);
  json j;
  j["value"] = c.value ? json(io::to_decimal(*c.value)) : json(nullptr);
  j["exact"] = c.exact;
  j["residues"] = residues;
  j["monomial"] = m.exponents;
  j["degree"] = m.degree();
  j["strategy"] = poly::to_string(res.strategy);
  j["frontier_peak"] = res.frontier_peak;
  j["elapsed_ms"] = static_cast<std::int64_t>(res.elapsed_ms);
  return j;
}

// Value equality when exact, residue agreement otherwise.
bool agrees(const poly::Coefficient& c, const mpz_class& expected) {
  if (c.exact && c.value) return *c.value == expected;
  for (const auto& r : c.residues)
    if (poly::mpz_mod_u64(expected, r.prime) != r.value) return false;
  return !c.residues.empty() || (c.value && *c.value == expected);
}

struct CoeffArgs {
  PolyArgs p;
  std::string family = "q";
  int k = 0;
  int ell = 0;
  int t = 0;
  std::int64_t u = 1;
  int anchor = 0;
  std::string monomial;
};

int cmd_coeff(const CoeffArgs& a, std::ostream& out) {
  poly::FormProduct product(0);
  int table_pair = 0;  // table number for u = 1 in this family
  int key = 0;
  if (a.family == "q") {
    product = poly::build_q(a.k, a.t, a.u);
    table_pair = 1;
    key = a.k;
  } else if (a.family == "h-top") {
    product = poly::build_h_top(a.k, a.ell, a.t, a.u);
    table_pair = a.ell == poly::kHTopEll ? 3 : 0;
    key = a.k;
  } else if (a.family == "r") {
    product = a.anchor > 0 ? poly::build_r(a.t, a.ell, a.u, a.anchor) : poly::build_r(a.t, a.ell, a.u);
    table_pair = (a.anchor == 0 || a.anchor == a.ell + a.t - 1) ? 5 : 0;
    key = a.ell;
  } else {
    throw PreconditionError("unknown family " + a.family + " (q, h-top, r)");
  }
  poly::Monomial m;
  if (a.monomial.empty()) {
    m = poly::bounding_monomial(product);
  } else {
    const json j = read_json_text(a.monomial, "monomial");
    if (!j.is_array()) throw PreconditionError("monomial must be an array of exponents");
    for (const auto& v : j) {
      if (!v.is_number_unsigned()) throw PreconditionError("exponents must be nonnegative integers");
      m.exponents.push_back(v.get<std::uint32_t>());
    }
  }
  const auto opts = extract_options(a.p);
  const auto res = poly::coefficient(product, m, opts);

  json r = {{"command", "coeff"},
            {"family", a.family},
            {"params", {{"k", product.params().k}, {"ell", product.params().ell}, {"t", product.params().t}, {"u", a.u}}},
            {"factor_count", product.total_degree()}};
  r.update(coefficient_json(res, m));
  r["matches_table"] = nullptr;
  if (table_pair > 0 && (a.u == 1 || a.u == -1)) {
    const int table = table_pair + (a.u == -1 ? 1 : 0);
    for (const auto& row : poly::embedded_tables()) {
      if (row.table != table || row.k_or_ell != key || row.t != a.t || !(row.monomial == m)) continue;
      r["table"] = table;
      r["table_value"] = row.factored;
      r["matches_table"] = agrees(res.coefficient, row.value);
    }
  }
  emit(out, r);
  return r["matches_table"].is_boolean() && !r["matches_table"].get<bool>() ? kFalse : kOk;
}

// ---- tables ----------------------------------------------------------------

struct TablesArgs {
  PolyArgs p;
  int id = 0;
  std::string rows;
};

int cmd_tables(const TablesArgs& a, std::ostream& out) {
  std::vector<int> wanted;
  if (!a.rows.empty()) {
    std::stringstream ss(a.rows);
    std::string item;
    while (std::getline(ss, item, ',')) {
      try {
        wanted.push_back(std::stoi(item));
      } catch (const std::exception&) {
        throw PreconditionError("bad row key '" + item + "'");
      }
    }
  }
  std::vector<poly::TableRow> rows;
  if (wanted.empty()) {
    rows = poly::find_rows(a.id);
  } else {
    for (int k : wanted) {
      auto part = poly::find_rows(a.id, k);
      rows.insert(rows.end(), part.begin(), part.end());
    }
  }
  const auto opts = extract_options(a.p);
  json list = json::array();
  bool all_match = true, any_error = false;
  for (const auto& row : rows) {
    json j = {{"k_or_ell", row.k_or_ell}, {"t", row.t}, {"u", row.u}, {"table_value", row.factored},
              {"table_decimal", io::to_decimal(row.value)}};
    try {
      const auto rep = poly::verify_table_row(row, opts);
      j.update(coefficient_json(rep.result, row.monomial));
      j["matches_table"] = rep.matches;
      j["divides_bounding"] = rep.divides_bounding;
      j["degree_ok"] = rep.degree_ok;
      all_match = all_match && rep.passed();
    } catch (const ResourceCapExceeded& e) {
      j["monomial"] = row.monomial.exponents;
      j["degree"] = row.monomial.degree();
      j["matches_table"] = nullptr;
      j["error"] = e.what();
      j["frontier_peak"] = e.frontier_peak();
      any_error = true;
    }
    list.push_back(j);
  }
  json r = {{"command", "tables"}, {"table", a.id}, {"version", poly::kTablesVersion}, {"rows", list},
            {"all_match", all_match && !any_error}};
  emit(out, r);
  if (any_error) return kError;
  return all_match ? kOk : kFalse;
}

// ---- bound -----------------------------------------------------------------

struct BoundArgs {
  int t = 1;
  std::int64_t ell = 2;
  std::string variant = "plain";
};

BoundVariant parse_variant(const std::string& v) {
  if (v == "plain") return BoundVariant::plain;
  if (v == "balanced") return BoundVariant::balanced;
  throw PreconditionError("variant must be plain or balanced");
}

int cmd_bound(const BoundArgs& a, std::ostream& out) {
  const auto q = bound_E({a.t, a.ell, parse_variant(a.variant)});
  json r = {{"command", "bound"},
            {"t", a.t},
            {"ell", a.ell},
            {"variant", a.variant},
            {"numerator", q.get_num().get_str()},
            {"denominator", q.get_den().get_str()},
            {"value", q.get_str()},
            {"approx", q.get_d()},
            {"below_one", q < 1}};
  emit(out, r);
  return kOk;
}

// ---- estimate --------------------------------------------------------------

struct EstimateArgs {
  Common c;
  std::string set, reserved, prefix;
  std::size_t ell = 0;
  std::uint64_t samples = 10000;
  std::uint64_t seed = 0;
  std::string variant = "balanced";
};

int cmd_estimate(const EstimateArgs& a, std::ostream& out) {
  const Group g = parse_group_spec(a.c.group);
  const auto variant = parse_variant(a.variant);
  std::vector<Element> set, reserved, prefix;
  json r = {{"command", "estimate"}, {"group", g.description()}, {"t", a.c.t}, {"variant", a.variant}};
  if (a.set.empty() && a.c.file.empty()) {
    if (a.ell == 0) throw PreconditionError("give --set/--reserved/--prefix, --file, or --ell to build an instance");
    const auto attempt = make_estimate_instance(g, a.c.t, a.ell, variant, a.seed);
    if (!attempt.instance) throw PreconditionError("no instance for ell = " + std::to_string(a.ell) + ": " + attempt.reason);
    set = attempt.instance->set;
    reserved = attempt.instance->reserved;
    prefix = attempt.instance->prefix;
    r["extraction_seed"] = attempt.instance->extraction_seed ? json(*attempt.instance->extraction_seed) : json(nullptr);
  } else if (!a.set.empty()) {
    set = io::elements_from_json(g, read_json_text(a.set, "set"));
    if (!a.reserved.empty()) reserved = io::elements_from_json(g, read_json_text(a.reserved, "reserved"));
    if (!a.prefix.empty()) prefix = io::elements_from_json(g, read_json_text(a.prefix, "prefix"));
  } else {
    const json f = read_json_text(slurp(a.c.file), a.c.file);
    set = io::elements_from_json(g, f.at("set"));
    if (f.contains("reserved")) reserved = io::elements_from_json(g, f["reserved"]);
    if (f.contains("prefix")) prefix = io::elements_from_json(g, f["prefix"]);
  }
  const std::size_t ell = reserved.size();
  const auto start = std::chrono::steady_clock::now();
  const auto est = estimate_collision_expectation(g, set, reserved, prefix, a.c.t, a.samples, a.seed, variant, a.c.jobs);
  const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  r["k"] = set.size();
  r["ell"] = ell;
  r["set"] = io::to_json(g, set);
  r["reserved"] = io::to_json(g, reserved);
  r["prefix"] = io::to_json(g, prefix);
  r.update(io::to_json(est));
  bool within = true;
  try {
    const auto b = bound_E({static_cast<int>(a.c.t), static_cast<std::int64_t>(ell), variant});
    r["bound"] = b.get_str();
    r["bound_approx"] = b.get_d();
    within = est.mean <= b.get_d() + 3 * est.std_error;
    r["within_bound"] = within;
  } catch (const PreconditionError&) {
    r["bound"] = nullptr;
    r["within_bound"] = nullptr;
  }
  r["elapsed_ms"] = static_cast<std::int64_t>(ms);
  emit(out, r);
  return within ? kOk : kFalse;
}

// ---- group -----------------------------------------------------------------

struct GroupArgs {
  std::string group;
  std::string sum, inverse, parity;
  bool elements = false;
};

int cmd_group(const GroupArgs& a, std::ostream& out) {
  const Group g = parse_group_spec(a.group);
  json r = {{"command", "group"},
            {"group", g.description()},
            {"order", g.size()},
            {"inner_order", g.inner_order()},
            {"has_parity", g.has_parity()},
            {"validation", g.validation() == ValidationMode::exhaustive ? "exhaustive" : "sampled"}};
  if (g.kind() == GroupKind::semidirect_cyclic) r["multiplier"] = g.multiplier();
  if (!a.sum.empty()) {
    const auto items = io::elements_from_json(g, read_json_text(a.sum, "sum"));
    Element s = g.identity();
    for (const auto& e : items) s = g.op(s, e);
    r["sum"] = io::to_json(g, s);
  }
  if (!a.inverse.empty()) r["inverse"] = io::to_json(g, g.inverse(io::element_from_json(g, read_json_text(a.inverse, "inverse"))));
  if (!a.parity.empty()) r["parity"] = g.parity(io::element_from_json(g, read_json_text(a.parity, "parity")));
  if (a.elements) r["elements"] = io::to_json(g, g.elements());
  emit(out, r);
  return kOk;
}

void add_group(CLI::App* app, std::string& dest) {
  app->add_option("--group", dest, "cyclic:<n> | zpxz2:<p> | dihedral:<2p> | semidirect:cyclic:<p>:u=<u> | table:<path>[:phi=...]")
      ->required();
}

void add_poly(CLI::App* app, PolyArgs& p) {
  app->add_option("--strategy", p.strategy, "auto | prune | mitm | naive | sweep");
  app->add_option("--primes", p.primes, "work modulo this many default 62-bit primes");
  app->add_option("--mod-primes", p.mod_primes, "comma-separated primes");
  app->add_flag("--reconstruct", p.reconstruct, "CRT value from the residues");
  app->add_flag("--bigint", p.bigint, "compute over arbitrary-precision integers");
  app->add_option("--frontier-cap", p.frontier_cap, "frontier size limit (default SEQLAB_FRONTIER_CAP or 2e8)");
  app->add_option("--jobs", p.jobs, "parallel prime channels");
}

json error_json(const std::string& kind, const std::string& message) { return {{"error", message}, {"kind", kind}}; }

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"seqlab: t-weak sequencings of group subsets and their polynomial certificates", "seqlab"};
  app.require_subcommand(1, 1);
  app.set_version_flag("--version", "seqlab 0.1 (tables v" + std::to_string(poly::kTablesVersion) + ")");

  VerifyArgs va;
  auto* verify = app.add_subcommand("verify", "check an ordering for window conflicts");
  add_group(verify, va.c.group);
  verify->add_option("--t", va.c.t, "window length")->required();
  verify->add_flag("--alternating", va.c.alternating, "also require alternating parities");
  verify->add_option("--ordering", va.ordering, "JSON array of elements");
  verify->add_option("--file", va.c.file, "read the ordering from a JSON file");

  ConstructArgs ca;
  auto* construct = app.add_subcommand("construct", "build an ordering or an extracted subset");
  add_group(construct, ca.c.group);
  construct->add_option("--method", ca.method, "t3 | t4 | prefix | prefix-alternating | extract-t23 | extract-t32 | zero-sum-free");
  construct->add_option("--set", ca.set, "JSON array of elements");
  construct->add_option("--file", ca.c.file, "read the set from a JSON file");
  construct->add_option("--t", ca.c.t, "window length (prefix, zero-sum-free)");
  construct->add_option("--length", ca.h, "prefix length h");
  construct->add_option("--max-size", ca.max_size, "zero-sum-free size limit");
  construct->add_flag("--alternating", ca.c.alternating, "zero-sum-free over alternating orders");
  construct->add_option("--seed", ca.seed, "seeded random tie-breaking");

  SearchArgs sa;
  auto* search = app.add_subcommand("search", "backtracking search for a t-weak sequencing");
  add_group(search, sa.c.group);
  search->add_option("--set", sa.set, "JSON array of elements");
  search->add_option("--file", sa.c.file, "read the set from a JSON file");
  search->add_option("--t", sa.c.t, "window length")->required();
  search->add_flag("--alternating", sa.c.alternating, "alternating parity orderings only");
  search->add_option("--start-parity", sa.start_parity, "fix the first element's parity")->check(CLI::Range(0, 1));

  VerifyAllArgs vaa;
  auto* verify_all_cmd = app.add_subcommand("verify-all", "search every balanced k-subset");
  add_group(verify_all_cmd, vaa.c.group);
  verify_all_cmd->add_option("--k", vaa.k, "subset size (even)")->required();
  verify_all_cmd->add_option("--t", vaa.c.t, "window length")->required();
  verify_all_cmd->add_flag("--alternating", vaa.c.alternating, "alternating parity orderings only");
  verify_all_cmd->add_option("--jobs", vaa.c.jobs, "worker threads");
  verify_all_cmd->add_option("--cap", vaa.cap, "enumeration cap");
  verify_all_cmd->add_option("--sample", vaa.sample, "check this many sampled subsets");
  verify_all_cmd->add_option("--seed", vaa.seed, "sampling seed");
  verify_all_cmd->add_option("--format", vaa.c.format, "json | csv")->check(CLI::IsMember({"json", "csv"}));

  CoeffArgs co;
  auto* coeff = app.add_subcommand("coeff", "coefficient of a monomial in a polynomial family");
  coeff->add_option("--family", co.family, "q | h-top | r");
  coeff->add_option("--k", co.k, "number of variables (q, h-top)");
  coeff->add_option("--ell", co.ell, "free variables (h-top, r)");
  coeff->add_option("--t", co.t, "window length")->required();
  coeff->add_option("--u", co.u, "automorphism multiplier; tables cover 1 and -1");
  coeff->add_option("--anchor", co.anchor, "anchor k for the r family");
  coeff->add_option("--monomial", co.monomial, "JSON exponent array (default: bounding monomial)");
  add_poly(coeff, co.p);

  TablesArgs ta;
  auto* tables = app.add_subcommand("tables", "recompute rows of the certificate tables");
  tables->add_option("--id", ta.id, "table 1-6")->required()->check(CLI::Range(1, 6));
  tables->add_option("--rows", ta.rows, "comma-separated k (or ell) values");
  add_poly(tables, ta.p);

  BoundArgs ba;
  auto* bound = app.add_subcommand("bound", "closed-form bound on the expected collisions");
  bound->add_option("--t", ba.t, "window length")->required();
  bound->add_option("--ell", ba.ell, "reserved set size")->required();
  bound->add_option("--variant", ba.variant, "plain | balanced")->check(CLI::IsMember({"plain", "balanced"}));

  EstimateArgs ea;
  auto* estimate = app.add_subcommand("estimate", "Monte Carlo estimate of the expected collisions");
  add_group(estimate, ea.c.group);
  estimate->add_option("--t", ea.c.t, "window length")->required();
  estimate->add_option("--set", ea.set, "JSON array: the whole set S");
  estimate->add_option("--reserved", ea.reserved, "JSON array: the zero-sum-free subset T");
  estimate->add_option("--prefix", ea.prefix, "JSON array: the fixed prefix");
  estimate->add_option("--file", ea.c.file, "JSON object with set, reserved, prefix");
  estimate->add_option("--ell", ea.ell, "build an instance with |T| = ell");
  estimate->add_option("--samples", ea.samples, "number of samples");
  estimate->add_option("--seed", ea.seed, "sampling seed");
  estimate->add_option("--variant", ea.variant, "plain | balanced")->check(CLI::IsMember({"plain", "balanced"}));
  estimate->add_option("--jobs", ea.c.jobs, "worker threads");

  GroupArgs ga;
  auto* group = app.add_subcommand("group", "group information and element arithmetic");
  add_group(group, ga.group);
  group->add_option("--sum", ga.sum, "JSON array of elements to add left to right");
  group->add_option("--inverse", ga.inverse, "JSON element");
  group->add_option("--parity", ga.parity, "JSON element");
  group->add_flag("--elements", ga.elements, "list all elements");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return kOk;
    emit(out, error_json("usage", e.what()));
    return kError;
  }

  try {
    if (verify->parsed()) return cmd_verify(va, out);
    if (construct->parsed()) return cmd_construct(ca, out);
    if (search->parsed()) return cmd_search(sa, out);
    if (verify_all_cmd->parsed()) return cmd_verify_all(vaa, out);
    if (coeff->parsed()) return cmd_coeff(co, out);
    if (tables->parsed()) return cmd_tables(ta, out);
    if (bound->parsed()) return cmd_bound(ba, out);
    if (estimate->parsed()) return cmd_estimate(ea, out);
    if (group->parsed()) return cmd_group(ga, out);
  } catch (const PreconditionError& e) {
    err << "seqlab: " << e.what() << '\n';
    emit(out, error_json("precondition", e.what()));
    return kError;
  } catch (const ResourceCapExceeded& e) {
    err << "seqlab: " << e.what() << '\n';
    auto j = error_json("resource_cap", e.what());
    j["frontier_peak"] = e.frontier_peak();
    emit(out, j);
    return kError;
  } catch (const InternalContradiction& e) {
    err << "seqlab: internal contradiction: " << e.what() << '\n';
    emit(out, error_json("internal_contradiction", e.what()));
    return kFalse;
  } catch (const json::exception& e) {
    err << "seqlab: " << e.what() << '\n';
    emit(out, error_json("precondition", e.what()));
    return kError;
  }
  return kError;
}

}  // namespace seqlab::cli
