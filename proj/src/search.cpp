#include "seqlab/search.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <numeric>
#include <thread>
#include <unordered_set>

#include "seqlab/construct.hpp"
#include "seqlab/errors.hpp"
#include "seqlab/rng.hpp"
#include "walk.hpp"

namespace seqlab {

namespace {

std::uint8_t parity_of_id(const Group& g, std::uint32_t id) {
  return g.has_parity() ? static_cast<std::uint8_t>(id / g.inner_order()) : 0;
}

class Backtracker {
 public:
  Backtracker(const Group& g, std::vector<std::uint32_t> ids, std::size_t t, bool alternating)
      : group_(g), ids_(std::move(ids)), alternating_(alternating), walk_(g, t), used_(ids_.size(), 0) {}

  bool run(std::uint8_t parity) {
    if (walk_.length() == ids_.size()) return true;
    for (std::size_t i = 0; i < ids_.size(); ++i) {
      if (used_[i]) continue;
      if (alternating_ && parity_of_id(group_, ids_[i]) != parity) continue;
      if (!walk_.fits(ids_[i])) continue;
      used_[i] = 1;
      walk_.push(ids_[i]);
      if (run(parity ^ 1)) return true;
      walk_.pop();
      used_[i] = 0;
    }
    return false;
  }

  std::span<const std::uint32_t> items() const { return walk_.items(); }

 private:
  const Group& group_;
  std::vector<std::uint32_t> ids_;
  bool alternating_;
  detail::Walk walk_;
  std::vector<char> used_;
};

std::uint64_t binomial_u64(std::uint64_t n, std::uint64_t k) {
  if (k > n) return 0;
  k = std::min(k, n - k);
  unsigned __int128 r = 1;
  for (std::uint64_t i = 1; i <= k; ++i) {
    r = r * (n - k + i) / i;
    if (r > UINT64_MAX) throw PreconditionError("binomial overflows 64 bits");
  }
  return static_cast<std::uint64_t>(r);
}

mpz_class binomial(unsigned long n, unsigned long k) {
  mpz_class r;
  mpz_bin_uiui(r.get_mpz_t(), n, k);
  return r;
}

// Lexicographic unranking of an m-combination of [0, n).
std::vector<std::uint32_t> unrank_combination(std::uint64_t rank, std::uint32_t n, std::uint32_t m) {
  std::vector<std::uint32_t> out;
  std::uint32_t next = 0;
  for (std::uint32_t slot = 0; slot < m; ++slot) {
    for (;; ++next) {
      const std::uint64_t block = binomial_u64(n - next - 1, m - slot - 1);
      if (rank < block) break;
      rank -= block;
    }
    out.push_back(next++);
  }
  return out;
}

bool next_combination(std::vector<std::uint32_t>& c, std::uint32_t n) {
  const std::size_t m = c.size();
  for (std::size_t i = m; i-- > 0;) {
    if (c[i] < n - m + i) {
      ++c[i];
      for (std::size_t j = i + 1; j < m; ++j) c[j] = c[j - 1] + 1;
      return true;
    }
  }
  return false;
}

std::uint64_t to_u64(const mpz_class& v) {
  if (v < 0 || mpz_sizeinbase(v.get_mpz_t(), 2) > 63) throw PreconditionError("count exceeds 2^63");
  std::uint64_t out = 0;
  mpz_export(&out, nullptr, 1, sizeof(out), 0, 0, v.get_mpz_t());
  return out;
}

// Runs body(chunk) for chunk in [0, chunks) on up to `jobs` threads; rethrows
// the first exception by chunk index.
void run_chunks(std::size_t chunks, unsigned jobs, const std::function<void(std::size_t)>& body) {
  std::vector<std::exception_ptr> errors(chunks);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t c = next++; c < chunks; c = next++) {
      try {
        body(c);
      } catch (...) {
        errors[c] = std::current_exception();
      }
    }
  };
  const unsigned n = std::max(1u, std::min<unsigned>(jobs, static_cast<unsigned>(chunks)));
  if (n == 1) {
    worker();
  } else {
    std::vector<std::thread> threads;
    for (unsigned i = 0; i < n; ++i) threads.emplace_back(worker);
    for (auto& th : threads) th.join();
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
}

}  // namespace

std::string to_string(OrderingClass c) { return c == OrderingClass::alternating ? "alternating" : "any"; }

std::string to_string(BoundVariant v) { return v == BoundVariant::balanced ? "balanced" : "plain"; }

std::optional<Ordering> find_sequencing_backtrack(const Group& group, std::span<const Element> set, std::size_t t,
                                                  OrderingClass cls, std::optional<std::uint8_t> start_parity) {
  if (t < 1) throw PreconditionError("t must be positive");
  require_proper_set(group, set);
  const bool alternating = cls == OrderingClass::alternating;
  if (alternating && !set_type(group, set).balanced())
    throw PreconditionError("alternating search needs a balanced set");
  std::vector<std::uint32_t> ids;
  for (const auto& e : set) ids.push_back(group.id(e));
  std::sort(ids.begin(), ids.end());

  std::vector<std::uint8_t> starts;
  if (start_parity) {
    starts.push_back(*start_parity);
  } else {
    starts = alternating ? std::vector<std::uint8_t>{0, 1} : std::vector<std::uint8_t>{0};
  }
  for (auto p : starts) {
    Backtracker bt(group, ids, t, alternating);
    if (bt.run(p)) {
      std::vector<Element> items;
      for (auto id : bt.items()) items.push_back(group.element(id));
      return Ordering(group, std::move(items));
    }
  }
  return std::nullopt;
}

BalancedSubsets::BalancedSubsets(const Group& group, std::size_t k) : group_(&group), k_(k), half_(k / 2) {
  if (!group.has_parity()) throw PreconditionError("balanced subsets need a group with parity");
  if (k % 2 != 0 || k == 0) throw PreconditionError("balanced subsets need a positive even k");
  const std::uint32_t n = group.inner_order();
  if (half_ > n - 1) throw PreconditionError("k too large: only " + std::to_string(n - 1) + " non-identity even elements");
  count_ = binomial(n - 1, half_) * binomial(n, half_);
  if (mpz_sizeinbase(count_.get_mpz_t(), 2) <= 63) odd_count_ = binomial_u64(n, half_);
}

std::vector<Element> BalancedSubsets::unrank(std::uint64_t r) const {
  if (odd_count_ == 0) throw PreconditionError("too many subsets to index");
  if (mpz_class(std::to_string(r)) >= count_) throw PreconditionError("rank out of range");
  const std::uint32_t n = group_->inner_order();
  const auto h = static_cast<std::uint32_t>(half_);
  const auto evens = unrank_combination(r / odd_count_, n - 1, h);
  const auto odds = unrank_combination(r % odd_count_, n, h);
  std::vector<Element> out;
  for (auto e : evens) out.push_back({e + 1, 0});
  for (auto o : odds) out.push_back({o, 1});
  return out;
}

void BalancedSubsets::for_each(std::uint64_t first, std::uint64_t last,
                               const std::function<bool(std::span<const Element>)>& f) const {
  if (first >= last) return;
  const std::uint32_t n = group_->inner_order();
  const auto h = static_cast<std::uint32_t>(half_);
  auto evens = unrank_combination(first / odd_count_, n - 1, h);
  auto odds = unrank_combination(first % odd_count_, n, h);
  std::vector<Element> subset(k_);
  for (std::uint64_t r = first; r < last; ++r) {
    for (std::size_t i = 0; i < h; ++i) subset[i] = {evens[i] + 1, 0};
    for (std::size_t i = 0; i < h; ++i) subset[h + i] = {odds[i], 1};
    if (!f(subset)) return;
    if (!next_combination(odds, n)) {
      next_combination(evens, n - 1);
      std::iota(odds.begin(), odds.end(), 0u);
    }
  }
}

SearchReport verify_all(const Group& group, std::size_t k, const VerifyAllOptions& options, const SubsetCheck& check,
                        const std::string& method) {
  const auto start = std::chrono::steady_clock::now();
  if (options.t < 1) throw PreconditionError("t must be positive");
  BalancedSubsets subsets(group, k);
  SearchReport report;
  report.group = group.description();
  report.k = k;
  report.t = options.t;
  report.cls = options.cls;
  report.method = method;
  report.subsets_total = subsets.count();
  report.seed = options.seed;
  report.jobs = options.jobs;

  const std::uint64_t total = to_u64(subsets.count());
  const bool sampling = options.sample && *options.sample < total;
  if (!sampling && total > options.cap)
    throw PreconditionError(subsets.count().get_str() + " subsets exceed the enumeration cap of " +
                            std::to_string(options.cap) + "; use sampling");

  SubsetCheck run = check;
  if (!run) {
    run = [t = options.t, cls = options.cls](const Group& g, std::span<const Element> s) {
      return find_sequencing_backtrack(g, s, t, cls).has_value();
    };
  }

  std::vector<std::uint64_t> ranks;
  if (sampling) {
    report.sampled = true;
    Rng rng(options.seed);
    std::unordered_set<std::uint64_t> seen;
    while (ranks.size() < *options.sample) {
      const auto r = rng.below(total);
      if (seen.insert(r).second) ranks.push_back(r);
    }
  }
  const std::uint64_t items = sampling ? ranks.size() : total;
  const std::size_t chunks = static_cast<std::size_t>(std::min<std::uint64_t>(items, 256));
  std::vector<std::vector<std::vector<Element>>> failures(chunks);
  auto bounds = [&](std::size_t c) {
    return std::pair<std::uint64_t, std::uint64_t>(items * c / chunks, items * (c + 1) / chunks);
  };
  run_chunks(chunks, std::max(1u, options.jobs), [&](std::size_t c) {
    const auto [lo, hi] = bounds(c);
    if (sampling) {
      for (auto i = lo; i < hi; ++i) {
        const auto s = subsets.unrank(ranks[i]);
        if (!run(group, s)) failures[c].push_back(s);
      }
    } else {
      subsets.for_each(lo, hi, [&](std::span<const Element> s) {
        if (!run(group, s)) failures[c].emplace_back(s.begin(), s.end());
        return true;
      });
    }
  });
  for (auto& f : failures)
    for (auto& s : f) report.failures.push_back(std::move(s));
  report.subsets_checked = items;
  report.elapsed_ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  return report;
}

mpq_class bound_E(const BoundParams& p) {
  if (p.t < 0) throw PreconditionError("t must be nonnegative");
  const std::int64_t t = p.t;
  auto power_ratio = [&](std::int64_t num, std::int64_t den) {
    mpz_class a, b;
    mpz_pow_ui(a.get_mpz_t(), mpz_class(static_cast<long>(num)).get_mpz_t(), static_cast<unsigned long>(t));
    mpz_pow_ui(b.get_mpz_t(), mpz_class(static_cast<long>(den)).get_mpz_t(), static_cast<unsigned long>(t));
    mpq_class q(a, b);
    q.canonicalize();
    return q;
  };
  const mpq_class one = 1;
  mpq_class result;
  if (p.variant == BoundVariant::plain) {
    if (p.t < 1 || p.ell < t + 1) throw PreconditionError("plain bound needs t >= 1 and ell >= t + 1");
    const mpq_class l(static_cast<long>(p.ell));
    result = mpq_class(t * t) / l +
             mpq_class(static_cast<long>(t * (p.ell + t))) / l * (one - power_ratio(p.ell - t + 1, p.ell + t));
  } else {
    if (p.ell < 2 || p.ell % 2 != 0 || p.ell < t) throw PreconditionError("balanced bound needs an even ell >= max(2, t)");
    const mpq_class l2(static_cast<long>(p.ell + 2));
    result = mpq_class(2 * t * t) / l2 +
             mpq_class(static_cast<long>(2 * t * (p.ell + t + 2))) / l2 * (one - power_ratio(p.ell - t, p.ell + t + 2));
  }
  result.canonicalize();
  return result;
}

EstimateResult estimate_collision_expectation(const Group& group, std::span<const Element> set,
                                              std::span<const Element> reserved, std::span<const Element> prefix,
                                              std::size_t t, std::uint64_t samples, std::uint64_t seed,
                                              BoundVariant variant, unsigned jobs) {
  if (t < 1) throw PreconditionError("t must be positive");
  if (samples < 1) throw PreconditionError("need at least one sample");
  require_proper_set(group, set);
  const bool balanced = variant == BoundVariant::balanced;
  if (balanced && !group.has_parity()) throw PreconditionError("balanced variant needs a group with parity");

  std::vector<char> in_set(group.size(), 0), in_prefix(group.size(), 0);
  for (const auto& e : set) in_set[group.id(e)] = 1;
  for (const auto& e : prefix) {
    if (!group.contains(e) || !in_set[group.id(e)]) throw PreconditionError("prefix element outside the set");
    if (in_prefix[group.id(e)]) throw PreconditionError("duplicate prefix element");
    in_prefix[group.id(e)] = 1;
  }
  const Ordering prefix_ord(group, {prefix.begin(), prefix.end()});
  if (!check_t_weak(prefix_ord, t).empty()) throw PreconditionError("prefix has window conflicts");
  if (balanced && !prefix.empty() && !is_alternating(prefix_ord).alternating)
    throw PreconditionError("prefix is not alternating");

  for (const auto& e : reserved)
    if (!group.contains(e) || !in_set[group.id(e)] || in_prefix[group.id(e)])
      throw PreconditionError("reserved element outside set \\ prefix");
  {
    // Certificate: no sub-multiset of size <= t sums to zero.
    const std::size_t m = reserved.size();
    const std::size_t top = std::min(t, m);
    double work = 0;
    for (std::size_t s = 1; s <= top; ++s) work += std::tgamma(static_cast<double>(m) + 1) /
                                                  (std::tgamma(static_cast<double>(m - s) + 1));
    if (work > 5e7) throw PreconditionError("reserved set too large to certify");
    std::vector<Element> pick;
    const OrderingClass cls = balanced ? OrderingClass::alternating : OrderingClass::any;
    std::function<void(std::size_t)> rec = [&](std::size_t from) {
      if (!pick.empty() && has_zero_sum(group, pick, cls))
        throw PreconditionError("reserved set has a zero-sum sub-multiset");
      if (pick.size() == top) return;
      for (std::size_t i = from; i < m; ++i) {
        pick.push_back(reserved[i]);
        rec(i + 1);
        pick.pop_back();
      }
    };
    rec(0);
  }

  std::vector<std::uint32_t> pre_ids, rest[2];
  for (const auto& e : prefix) pre_ids.push_back(group.id(e));
  for (const auto& e : set) {
    const auto id = group.id(e);
    if (!in_prefix[id]) rest[balanced ? group.parity(e) : 0].push_back(id);
  }
  for (auto& r : rest) std::sort(r.begin(), r.end());
  const std::size_t k = set.size();
  std::vector<std::uint8_t> slot_parity;
  if (balanced) {
    std::uint8_t p = prefix.empty() ? 0 : static_cast<std::uint8_t>(group.parity(prefix.back()) ^ 1);
    std::size_t need[2] = {0, 0};
    for (std::size_t i = prefix.size(); i < k; ++i, p ^= 1) {
      slot_parity.push_back(p);
      ++need[p];
    }
    if (need[0] != rest[0].size() || need[1] != rest[1].size())
      throw PreconditionError("set \\ prefix cannot complete an alternating ordering");
  }

  constexpr std::uint64_t kChunk = 1024;
  const std::uint64_t chunks = (samples + kChunk - 1) / kChunk;
  std::vector<std::uint64_t> sum(chunks, 0), sumsq(chunks, 0), maxima(chunks, 0), zeros(chunks, 0);
  run_chunks(static_cast<std::size_t>(chunks), std::max(1u, jobs), [&](std::size_t c) {
    Rng rng(Rng::derive(seed, c));
    std::vector<std::uint32_t> pools[2] = {rest[0], rest[1]};
    std::vector<std::uint32_t> sums(k + 1);
    const std::uint64_t n = std::min<std::uint64_t>(kChunk, samples - c * kChunk);
    for (std::uint64_t s = 0; s < n; ++s) {
      rng.shuffle(std::span(pools[0]));
      if (balanced) rng.shuffle(std::span(pools[1]));
      sums[0] = group.id(group.identity());
      std::size_t pos = 0;
      std::size_t taken[2] = {0, 0};
      for (auto id : pre_ids) {
        sums[pos + 1] = group.op_id(sums[pos], id);
        ++pos;
      }
      for (std::size_t i = 0; pos < k; ++i, ++pos) {
        const int p = balanced ? slot_parity[i] : 0;
        sums[pos + 1] = group.op_id(sums[pos], pools[p][taken[p]++]);
      }
      std::uint64_t x = 0;
      for (std::size_t j = 1; j <= k; ++j)
        for (std::size_t i = j > t ? j - t : 0; i < j; ++i) x += sums[i] == sums[j];
      sum[c] += x;
      sumsq[c] += x * x;
      maxima[c] = std::max(maxima[c], x);
      zeros[c] += x == 0;
    }
  });

  EstimateResult r;
  r.samples = samples;
  r.seed = seed;
  std::uint64_t total = 0, total_sq = 0;
  for (std::uint64_t c = 0; c < chunks; ++c) {
    total += sum[c];
    total_sq += sumsq[c];
    r.max_collisions = std::max(r.max_collisions, maxima[c]);
    r.zero_collision_samples += zeros[c];
  }
  const double n = static_cast<double>(samples);
  r.mean = static_cast<double>(total) / n;
  if (samples > 1) {
    const double var = (static_cast<double>(total_sq) - static_cast<double>(total) * r.mean) / (n - 1);
    r.stddev = std::sqrt(std::max(0.0, var));
  }
  r.std_error = r.stddev / std::sqrt(n);
  r.ci95_low = r.mean - 1.96 * r.std_error;
  r.ci95_high = r.mean + 1.96 * r.std_error;
  return r;
}

}  // namespace seqlab
