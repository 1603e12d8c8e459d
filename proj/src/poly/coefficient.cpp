#include "seqlab/poly/coefficient.hpp"

#include <algorithm>
#include <bit>
#include <chrono>
#include <cstdlib>
#include <future>
#include <map>
#include <numeric>
#include <set>

#include <absl/container/flat_hash_map.h>
#include <absl/hash/hash.h>

#include "seqlab/errors.hpp"

namespace seqlab::poly {

namespace {

using Key = unsigned __int128;

constexpr unsigned kNibble = 4;
constexpr std::uint32_t kMaxExponent = 15;
constexpr std::size_t kNaiveMaxFactors = 15;

struct KeyHash {
  std::size_t operator()(Key k) const {
    return absl::Hash<std::pair<std::uint64_t, std::uint64_t>>{}(
        {static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(k >> 64)});
  }
};

inline std::uint32_t nibble(Key k, std::uint32_t v) {
  return static_cast<std::uint32_t>(k >> (kNibble * v)) & 0xF;
}
inline Key unit(std::uint32_t v) { return Key{1} << (kNibble * v); }

struct ModRing {
  using Value = std::uint64_t;
  std::uint64_t p;

  Value from(std::int64_t c) const { return reduce_signed(c, p); }
  Value one() const { return 1 % p; }
  void add_mul(Value& acc, Value a, Value b) const {
    acc += mulmod(a, b, p);
    if (acc >= p) acc -= p;
  }
  void add(Value& acc, Value a) const {
    acc += a;
    if (acc >= p) acc -= p;
  }
  Value neg(Value a) const { return a == 0 ? 0 : p - a; }
  bool is_zero(Value a) const { return a == 0; }
};

struct BigRing {
  using Value = mpz_class;

  Value from(std::int64_t c) const { return mpz_class(static_cast<long>(c)); }
  Value one() const { return 1; }
  void add_mul(Value& acc, const Value& a, const Value& b) const {
    mpz_addmul(acc.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  }
  void add(Value& acc, const Value& a) const { acc += a; }
  Value neg(const Value& a) const { return -a; }
  bool is_zero(const Value& a) const { return a == 0; }
};

template <class Ring>
using Frontier = absl::flat_hash_map<Key, typename Ring::Value, KeyHash>;

struct PreparedTerm {
  std::uint32_t var;
  std::int64_t coeff;
  std::uint32_t rem_after;  // factors after this one that contain var
};

struct PreparedFactor {
  std::vector<PreparedTerm> terms;
  std::int64_t constant = 0;
};

struct Plan {
  std::uint32_t n = 0;
  std::vector<std::uint32_t> target;
  std::vector<std::uint32_t> lower;  // final exponent lower bound per variable
  Key target_key = 0;
  std::vector<PreparedFactor> factors;
};

std::vector<std::size_t> factor_order(const std::vector<LinearForm>& forms, std::span<const std::size_t> subset,
                                      FactorOrder order) {
  std::vector<std::size_t> idx(subset.begin(), subset.end());
  if (order == FactorOrder::by_max_variable) {
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      const auto& fa = forms[a];
      const auto& fb = forms[b];
      const auto ka = std::pair(fa.terms.empty() ? 0u : fa.max_var(), fa.terms.empty() ? 0u : fa.min_var());
      const auto kb = std::pair(fb.terms.empty() ? 0u : fb.max_var(), fb.terms.empty() ? 0u : fb.min_var());
      return ka < kb;
    });
  }
  return idx;
}

// Fills rem_after for a factor sequence; `extra` holds per-variable counts of
// factors processed elsewhere that still follow this sequence.
void annotate_remaining(std::vector<PreparedFactor>& factors, std::uint32_t n, std::span<const std::uint32_t> extra) {
  std::vector<std::uint32_t> rem(extra.begin(), extra.end());
  rem.resize(n, 0);
  for (auto f = factors.rbegin(); f != factors.rend(); ++f) {
    for (auto& term : f->terms) term.rem_after = rem[term.var];
    for (const auto& term : f->terms) ++rem[term.var];
  }
}

PreparedFactor prepare(const LinearForm& form) {
  PreparedFactor pf;
  pf.constant = form.constant;
  for (const auto& t : form.terms) pf.terms.push_back({t.var, t.coeff, 0});
  return pf;
}

class PeakTracker {
 public:
  PeakTracker(std::size_t cap) : cap_(cap) {}
  void observe(std::size_t size) {
    peak_ = std::max(peak_, size);
    if (size > cap_)
      throw ResourceCapExceeded("frontier exceeded cap of " + std::to_string(cap_) +
                                    " entries; try mod-prime channels, a different strategy, or raise "
                                    "SEQLAB_FRONTIER_CAP",
                                peak_);
  }
  std::size_t peak() const { return peak_; }

 private:
  std::size_t cap_;
  std::size_t peak_ = 0;
};

// Multiplies `cur` by one factor, keeping keys with exponent <= target and
// exponent + remaining occurrences >= lower bound for the factor's variables.
template <class Ring>
Frontier<Ring> multiply(const Ring& ring, const Frontier<Ring>& cur, const PreparedFactor& f, const Plan& plan,
                        bool prune, PeakTracker& peak) {
  Frontier<Ring> next;
  next.reserve(cur.size() * 2);
  std::vector<typename Ring::Value> coeffs;
  for (const auto& t : f.terms) coeffs.push_back(ring.from(t.coeff));
  const auto constant = ring.from(f.constant);
  const std::size_t nt = f.terms.size();
  std::vector<char> ok_inc(nt), ok_stay(nt);

  for (const auto& [key, val] : cur) {
    int failing_stay = 0;
    std::size_t fail_index = 0;
    for (std::size_t i = 0; i < nt; ++i) {
      const auto& t = f.terms[i];
      const std::uint32_t e = nibble(key, t.var);
      if (prune) {
        ok_inc[i] = e + 1 <= plan.target[t.var] && e + 1 + t.rem_after >= plan.lower[t.var];
        ok_stay[i] = e + t.rem_after >= plan.lower[t.var];
      } else {
        if (e + 1 > kMaxExponent) throw PreconditionError("exponent overflow in naive expansion");
        ok_inc[i] = ok_stay[i] = 1;
      }
      if (!ok_stay[i]) {
        ++failing_stay;
        fail_index = i;
      }
    }
    if (failing_stay >= 2) continue;
    for (std::size_t i = 0; i < nt; ++i) {
      if (!ok_inc[i]) continue;
      if (failing_stay == 1 && fail_index != i) continue;
      auto [it, inserted] = next.try_emplace(key + unit(f.terms[i].var));
      ring.add_mul(it->second, val, coeffs[i]);
    }
    if (f.constant != 0 && failing_stay == 0) {
      auto [it, inserted] = next.try_emplace(key);
      ring.add_mul(it->second, val, constant);
    }
  }
  absl::erase_if(next, [&](const auto& kv) { return ring.is_zero(kv.second); });
  peak.observe(next.size());
  return next;
}

template <class Ring>
Frontier<Ring> expand(const Ring& ring, const std::vector<PreparedFactor>& factors, const Plan& plan, bool prune,
                      PeakTracker& peak) {
  Frontier<Ring> cur;
  cur.emplace(Key{0}, ring.one());
  for (const auto& f : factors) cur = multiply(ring, cur, f, plan, prune, peak);
  return cur;
}

Plan make_plan(const FormProduct& product, const Monomial& target) {
  Plan plan;
  plan.n = product.variable_count();
  if (plan.n * kNibble > 128) throw PreconditionError("too many variables for 4-bit exponent packing");
  plan.target = target.exponents;
  plan.lower = target.exponents;
  for (std::uint32_t v = 0; v < plan.n; ++v) {
    if (plan.target[v] > kMaxExponent) throw PreconditionError("target exponent exceeds 4-bit packing");
    plan.target_key += static_cast<Key>(plan.target[v]) * unit(v);
  }
  return plan;
}

template <class Ring>
typename Ring::Value run_prune(const Ring& ring, const FormProduct& product, const Monomial& target,
                               const ExtractOptions& options, PeakTracker& peak) {
  Plan plan = make_plan(product, target);
  std::vector<std::size_t> all(product.factors().size());
  std::iota(all.begin(), all.end(), 0);
  for (auto i : factor_order(product.factors(), all, options.order)) plan.factors.push_back(prepare(product.factors()[i]));
  annotate_remaining(plan.factors, plan.n, {});
  const auto frontier = expand(ring, plan.factors, plan, true, peak);
  const auto it = frontier.find(plan.target_key);
  return it == frontier.end() ? typename Ring::Value{} : it->second;
}

template <class Ring>
typename Ring::Value run_naive(const Ring& ring, const FormProduct& product, const Monomial& target,
                               PeakTracker& peak) {
  if (product.factors().size() > kNaiveMaxFactors)
    throw PreconditionError("naive expansion is limited to " + std::to_string(kNaiveMaxFactors) + " factors");
  Plan plan = make_plan(product, target);
  for (const auto& f : product.factors()) plan.factors.push_back(prepare(f));
  const auto frontier = expand(ring, plan.factors, plan, false, peak);
  const auto it = frontier.find(plan.target_key);
  return it == frontier.end() ? typename Ring::Value{} : it->second;
}

template <class Ring>
typename Ring::Value run_mitm(const Ring& ring, const FormProduct& product, const Monomial& target,
                              const ExtractOptions& options, PeakTracker& peak) {
  Plan plan = make_plan(product, target);
  std::vector<std::size_t> all(product.factors().size());
  std::iota(all.begin(), all.end(), 0);
  const auto ordered = factor_order(product.factors(), all, options.order);
  const std::size_t half = ordered.size() / 2;

  std::vector<PreparedFactor> first, second;
  for (std::size_t i = 0; i < ordered.size(); ++i)
    (i < half ? first : second).push_back(prepare(product.factors()[ordered[i]]));

  std::vector<std::uint32_t> count_first(plan.n, 0), count_second(plan.n, 0);
  for (const auto& f : first)
    for (const auto& t : f.terms) ++count_first[t.var];
  for (const auto& f : second)
    for (const auto& t : f.terms) ++count_second[t.var];

  annotate_remaining(first, plan.n, count_second);
  annotate_remaining(second, plan.n, {});
  const auto left = expand(ring, first, plan, true, peak);

  Plan right_plan = plan;
  for (std::uint32_t v = 0; v < plan.n; ++v)
    right_plan.lower[v] = plan.target[v] > count_first[v] ? plan.target[v] - count_first[v] : 0;
  const auto right = expand(ring, second, right_plan, true, peak);

  typename Ring::Value total{};
  for (const auto& [key, val] : left) {
    const auto it = right.find(plan.target_key - key);
    if (it != right.end()) ring.add_mul(total, val, it->second);
  }
  return total;
}

// ---- sweep --------------------------------------------------------------

struct SweepLayout {
  std::vector<int> cls;                 // class index per variable, -1 if none
  std::vector<std::uint32_t> class_size;
  std::vector<std::uint32_t> mask_offset;  // bit offset of each class mask
};

inline std::uint32_t class_mask(Key k, const SweepLayout& layout, int c) {
  return static_cast<std::uint32_t>(k >> layout.mask_offset[c]) & ((1u << layout.class_size[c]) - 1);
}

// Checks that the remaining Vandermonde degrees of every class can still be
// matched to its uncontracted variables.
bool hall_feasible(Key key, const SweepLayout& layout, const std::vector<std::vector<std::uint32_t>>& classes,
                   const std::vector<char>& contracted, const std::vector<std::uint32_t>& rem,
                   const std::vector<std::uint32_t>& target) {
  std::pair<int, int> intervals[32];
  for (std::size_t c = 0; c < classes.size(); ++c) {
    const std::uint32_t size = layout.class_size[c];
    const std::uint32_t free = ~class_mask(key, layout, static_cast<int>(c)) & ((1u << size) - 1);
    int count = 0;
    for (auto v : classes[c]) {
      if (contracted[v]) continue;
      const int w = static_cast<int>(nibble(key, v));
      const int hi = std::min(static_cast<int>(target[v]) - w, static_cast<int>(size) - 1);
      const int lo = std::max(0, static_cast<int>(target[v]) - w - static_cast<int>(rem[v]));
      if (hi < lo) return false;
      intervals[count++] = {hi, lo};
    }
    std::sort(intervals, intervals + count);
    std::uint32_t avail = free;
    for (int i = 0; i < count; ++i) {
      const auto [hi, lo] = intervals[i];
      const std::uint32_t candidates = avail & ~((1u << lo) - 1);
      if (candidates == 0) return false;
      const int pick = std::countr_zero(candidates);
      if (pick > hi) return false;
      avail &= ~(1u << pick);
    }
  }
  return true;
}

template <class Ring>
typename Ring::Value run_sweep(const Ring& ring, const FormProduct& product, const Monomial& target,
                               const ExtractOptions& options, PeakTracker& peak) {
  const auto& classes = product.vandermonde_classes();
  if (classes.empty()) throw PreconditionError("sweep strategy needs recorded Vandermonde classes");
  Plan plan = make_plan(product, target);
  const std::uint32_t n = plan.n;

  SweepLayout layout;
  layout.cls.assign(n, -1);
  std::uint32_t offset = kNibble * n;
  std::size_t expected_pairs = 0;
  for (std::size_t c = 0; c < classes.size(); ++c) {
    for (auto v : classes[c]) {
      if (v >= n || layout.cls[v] != -1) throw PreconditionError("invalid Vandermonde classes");
      layout.cls[v] = static_cast<int>(c);
    }
    if (classes[c].size() > 16) throw PreconditionError("Vandermonde class too large for sweep");
    layout.class_size.push_back(static_cast<std::uint32_t>(classes[c].size()));
    layout.mask_offset.push_back(offset);
    offset += static_cast<std::uint32_t>(classes[c].size());
    expected_pairs += classes[c].size() * (classes[c].size() - 1) / 2;
  }
  if (offset > 128) throw PreconditionError("sweep state does not fit in 128 bits");

  // The tagged Vandermonde factors must be exactly the class differences.
  std::set<std::pair<std::uint32_t, std::uint32_t>> pairs;
  std::vector<std::size_t> rest;
  for (std::size_t i = 0; i < product.factors().size(); ++i) {
    if (product.kinds()[i] != FactorKind::vandermonde) {
      rest.push_back(i);
      continue;
    }
    const auto& f = product.factors()[i];
    if (f.constant != 0 || f.terms.size() != 2) throw PreconditionError("malformed Vandermonde factor");
    // terms are sorted by variable: (earlier, -1), (later, +1)
    if (f.terms[0].coeff != -1 || f.terms[1].coeff != 1) throw PreconditionError("malformed Vandermonde factor");
    const auto a = f.terms[0].var, b = f.terms[1].var;
    if (layout.cls[a] == -1 || layout.cls[a] != layout.cls[b]) throw PreconditionError("Vandermonde factor crosses classes");
    if (!pairs.emplace(a, b).second) throw PreconditionError("repeated Vandermonde factor");
  }
  if (pairs.size() != expected_pairs) throw PreconditionError("Vandermonde classes incomplete");
  for (const auto& cls : classes)
    if (!std::is_sorted(cls.begin(), cls.end())) throw PreconditionError("Vandermonde class must be sorted");

  for (std::uint32_t v = 0; v < n; ++v) {
    if (layout.cls[v] >= 0) {
      const std::uint32_t span = layout.class_size[layout.cls[v]] - 1;
      plan.lower[v] = plan.target[v] > span ? plan.target[v] - span : 0;
    }
  }
  for (auto i : factor_order(product.factors(), rest, options.order)) plan.factors.push_back(prepare(product.factors()[i]));
  annotate_remaining(plan.factors, n, {});

  // last factor index touching each variable (-1 if none)
  std::vector<long> last_use(n, -1);
  std::vector<std::uint32_t> rem(n, 0);
  for (std::size_t f = 0; f < plan.factors.size(); ++f)
    for (const auto& t : plan.factors[f].terms) {
      last_use[t.var] = static_cast<long>(f);
      ++rem[t.var];
    }

  std::vector<char> contracted(n, 0);
  std::uint32_t next_var = 0;
  Frontier<Ring> cur;
  cur.emplace(Key{0}, ring.one());

  auto contract = [&](std::uint32_t v) {
    Frontier<Ring> out;
    out.reserve(cur.size());
    const int c = layout.cls[v];
    for (const auto& [key, val] : cur) {
      const std::uint32_t w = nibble(key, v);
      Key nk = key & ~(Key{0xF} << (kNibble * v));
      bool negate = false;
      if (c < 0) {
        if (w != plan.target[v]) continue;
      } else {
        if (w > plan.target[v]) continue;
        const std::uint32_t e = plan.target[v] - w;
        if (e >= layout.class_size[c]) continue;
        const std::uint32_t mask = class_mask(key, layout, c);
        if (mask & (1u << e)) continue;
        negate = std::popcount(mask >> (e + 1)) & 1;
        nk |= Key{1} << (layout.mask_offset[c] + e);
      }
      auto [it, inserted] = out.try_emplace(nk);
      ring.add(it->second, negate ? ring.neg(val) : val);
    }
    absl::erase_if(out, [&](const auto& kv) { return ring.is_zero(kv.second); });
    contracted[v] = 1;
    cur = std::move(out);
    peak.observe(cur.size());
  };
  auto contract_ready = [&](long step) {
    while (next_var < n && last_use[next_var] <= step) contract(next_var++);
  };

  contract_ready(-1);
  for (std::size_t f = 0; f < plan.factors.size(); ++f) {
    cur = multiply(ring, cur, plan.factors[f], plan, true, peak);
    for (const auto& t : plan.factors[f].terms) --rem[t.var];
    absl::erase_if(cur, [&](const auto& kv) {
      return !hall_feasible(kv.first, layout, classes, contracted, rem, plan.target);
    });
    contract_ready(static_cast<long>(f));
  }
  contract_ready(static_cast<long>(plan.factors.size()));
  if (next_var != n) throw InternalContradiction("sweep left variables uncontracted");

  Key full = 0;
  for (std::size_t c = 0; c < classes.size(); ++c)
    full |= ((Key{1} << layout.class_size[c]) - 1) << layout.mask_offset[c];
  const auto it = cur.find(full);
  return it == cur.end() ? typename Ring::Value{} : it->second;
}

template <class Ring>
typename Ring::Value dispatch(const Ring& ring, const FormProduct& product, const Monomial& target, Strategy strategy,
                              const ExtractOptions& options, PeakTracker& peak) {
  switch (strategy) {
    case Strategy::prune:
      return run_prune(ring, product, target, options, peak);
    case Strategy::mitm:
      return run_mitm(ring, product, target, options, peak);
    case Strategy::naive:
      return run_naive(ring, product, target, peak);
    case Strategy::sweep:
      return run_sweep(ring, product, target, options, peak);
    default:
      throw PreconditionError("unresolved strategy");
  }
}

Strategy resolve(const FormProduct&, Strategy s) {
  return s == Strategy::automatic ? Strategy::prune : s;
}

// Returns false when the coefficient is trivially zero by degree.
bool check_shape(const FormProduct& product, const Monomial& target) {
  if (target.exponents.size() != product.variable_count())
    throw PreconditionError("monomial has " + std::to_string(target.exponents.size()) + " exponents, product has " +
                            std::to_string(product.variable_count()) + " variables");
  if (product.homogeneous() && target.degree() != product.total_degree()) {
    if (product.family() == Family::h_top)
      throw PreconditionError("h-top extraction needs full degree " + std::to_string(product.total_degree()) +
                              ", monomial has degree " + std::to_string(target.degree()));
    return false;
  }
  if (target.degree() > product.total_degree()) return false;
  return true;
}

}  // namespace

std::string to_string(Strategy s) {
  switch (s) {
    case Strategy::prune:
      return "prune";
    case Strategy::mitm:
      return "mitm";
    case Strategy::naive:
      return "naive";
    case Strategy::sweep:
      return "sweep";
    default:
      return "auto";
  }
}

Strategy parse_strategy(const std::string& name) {
  if (name == "auto") return Strategy::automatic;
  if (name == "prune") return Strategy::prune;
  if (name == "mitm") return Strategy::mitm;
  if (name == "naive") return Strategy::naive;
  if (name == "sweep") return Strategy::sweep;
  throw PreconditionError("unknown strategy '" + name + "'");
}

std::size_t frontier_cap_from_env() {
  if (const char* env = std::getenv("SEQLAB_FRONTIER_CAP")) {
    char* end = nullptr;
    const auto v = std::strtoull(env, &end, 10);
    if (end != env && *end == '\0' && v > 0) return static_cast<std::size_t>(v);
    throw PreconditionError("SEQLAB_FRONTIER_CAP must be a positive integer");
  }
  return kDefaultFrontierCap;
}

std::uint64_t coefficient_mod(const FormProduct& product, const Monomial& target, std::uint64_t prime,
                              Strategy strategy, const ExtractOptions& options, std::size_t* frontier_peak) {
  if (prime < 2) throw PreconditionError("modulus must be at least 2");
  PeakTracker peak(options.frontier_cap);
  std::uint64_t value = 0;
  if (check_shape(product, target)) {
    value = dispatch(ModRing{prime}, product, target, resolve(product, strategy), options, peak);
  }
  if (frontier_peak) *frontier_peak = peak.peak();
  return value;
}

ExtractResult coefficient(const FormProduct& product, const Monomial& target, const ExtractOptions& options) {
  const auto start = std::chrono::steady_clock::now();
  ExtractResult result;
  result.strategy = resolve(product, options.strategy);
  const bool nonzero_possible = check_shape(product, target);

  if (options.bigint || result.strategy == Strategy::naive) {
    PeakTracker peak(options.frontier_cap);
    mpz_class value = 0;
    if (nonzero_possible) value = dispatch(BigRing{}, product, target, result.strategy, options, peak);
    result.frontier_peak = peak.peak();
    result.coefficient.value = value;
    result.coefficient.exact = true;
    for (auto p : options.mod_primes) result.coefficient.residues.push_back({p, mpz_mod_u64(value, p)});
  } else {
    const bool exact_mode = options.mod_primes.empty();
    const auto primes = exact_mode ? default_primes(primes_needed(product.coefficient_bound())) : options.mod_primes;
    std::vector<std::size_t> peaks(primes.size(), 0);
    std::vector<std::uint64_t> values(primes.size(), 0);
    auto channel = [&](std::size_t i) {
      values[i] = coefficient_mod(product, target, primes[i], result.strategy, options, &peaks[i]);
    };
    const unsigned jobs = std::max(1u, options.jobs);
    if (jobs == 1 || primes.size() == 1) {
      for (std::size_t i = 0; i < primes.size(); ++i) channel(i);
    } else {
      for (std::size_t base = 0; base < primes.size(); base += jobs) {
        std::vector<std::future<void>> tasks;
        for (std::size_t i = base; i < std::min(primes.size(), base + jobs); ++i)
          tasks.push_back(std::async(std::launch::async, channel, i));
        for (auto& t : tasks) t.get();
      }
    }
    for (std::size_t i = 0; i < primes.size(); ++i) result.coefficient.residues.push_back({primes[i], values[i]});
    result.frontier_peak = *std::max_element(peaks.begin(), peaks.end());
    if (exact_mode || options.reconstruct) {
      result.coefficient.value = crt_symmetric(result.coefficient.residues);
      mpz_class modulus = 1;
      for (auto p : primes) {
        mpz_class pz;
        mpz_import(pz.get_mpz_t(), 1, 1, sizeof(p), 0, 0, &p);
        modulus *= pz;
      }
      result.coefficient.exact = modulus > 2 * product.coefficient_bound();
    }
    if (exact_mode) result.coefficient.residues.clear();
  }
  result.elapsed_ms =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return result;
}

}  // namespace seqlab::poly
