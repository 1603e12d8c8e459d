#include "seqlab/construct.hpp"

#include <algorithm>
#include <functional>

#include "seqlab/errors.hpp"
#include "seqlab/rng.hpp"
#include "walk.hpp"

namespace seqlab {

namespace {

constexpr std::size_t kMaxZeroSumCheck = 8;

std::uint8_t parity_of_id(const Group& g, std::uint32_t id) { return static_cast<std::uint8_t>(id / g.inner_order()); }

std::vector<std::uint32_t> sorted_ids(const Group& g, std::span<const Element> set) {
  std::vector<std::uint32_t> ids;
  for (const auto& e : set) ids.push_back(g.id(e));
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<Element> to_elements(const Group& g, std::span<const std::uint32_t> ids) {
  std::vector<Element> out;
  for (auto id : ids) out.push_back(g.element(id));
  return out;
}

void require_parity_balanced(const Group& g, std::span<const Element> set) {
  if (!g.has_parity()) throw PreconditionError("needs a group N x| Z2 with parity");
  require_proper_set(g, set);
  if (!set_type(g, set).balanced()) throw PreconditionError("set is not balanced");
}

void remove_ids(std::vector<std::uint32_t>& from, std::span<const std::uint32_t> ids) {
  std::erase_if(from, [&](std::uint32_t x) { return std::find(ids.begin(), ids.end(), x) != ids.end(); });
}

// Candidates in `pool` (optionally of one parity) that extend the walk.
std::vector<std::uint32_t> valid_candidates(const Group& g, const detail::Walk& walk,
                                            const std::vector<std::uint32_t>& pool, int parity) {
  std::vector<std::uint32_t> out;
  for (auto id : pool)
    if ((parity < 0 || parity_of_id(g, id) == parity) && walk.fits(id)) out.push_back(id);
  return out;
}

// Left-to-right greedy prefix with a one-step backtrack. parity_at(i) gives the
// required parity of position i (0-based) or -1 for none.
std::vector<std::uint32_t> build_prefix(const Group& g, std::vector<std::uint32_t> pool, std::size_t h,
                                        std::size_t t, const std::function<int(std::size_t)>& parity_at,
                                        const std::function<void(std::size_t)>& before_step,
                                        const ConstructOptions& options) {
  std::optional<Rng> rng;
  if (options.seed) rng.emplace(*options.seed);
  auto pick = [&](const std::vector<std::uint32_t>& c) { return rng ? c[rng->below(c.size())] : c.front(); };

  detail::Walk walk(g, t);
  while (walk.length() < h) {
    const std::size_t i = walk.length();
    before_step(i);
    auto cand = valid_candidates(g, walk, pool, parity_at(i));
    if (cand.empty() && i > 0) {
      // Replace the previous element by another valid choice that leaves a
      // candidate for this position.
      const std::uint32_t prev = walk.items().back();
      walk.pop();
      pool.push_back(prev);
      std::sort(pool.begin(), pool.end());
      for (auto alt : valid_candidates(g, walk, pool, parity_at(i - 1))) {
        if (alt == prev) continue;
        walk.push(alt);
        std::erase(pool, alt);
        cand = valid_candidates(g, walk, pool, parity_at(i));
        if (!cand.empty()) break;
        walk.pop();
        pool.push_back(alt);
        std::sort(pool.begin(), pool.end());
      }
      if (cand.empty()) {
        walk.push(prev);
        std::erase(pool, prev);
      }
    }
    if (cand.empty())
      throw InternalContradiction("greedy prefix found no candidate at position " + std::to_string(i + 1));
    const auto chosen = pick(cand);
    walk.push(chosen);
    std::erase(pool, chosen);
  }
  return {walk.items().begin(), walk.items().end()};
}

// Depth-first completion of the walk by every element of `pool`, with the
// parity alternating from `parity` onwards. Leaves the walk extended on
// success, unchanged on failure.
bool extend_block(const Group& g, detail::Walk& walk, std::vector<std::uint32_t>& pool, std::uint8_t parity) {
  if (pool.empty()) return true;
  for (std::size_t i = 0; i < pool.size(); ++i) {
    const auto id = pool[i];
    if (parity_of_id(g, id) != parity || !walk.fits(id)) continue;
    walk.push(id);
    pool.erase(pool.begin() + static_cast<std::ptrdiff_t>(i));
    if (extend_block(g, walk, pool, parity ^ 1)) return true;
    pool.insert(pool.begin() + static_cast<std::ptrdiff_t>(i), id);
    walk.pop();
  }
  return false;
}

void verify_construction(const Group& g, const std::vector<Element>& items, std::size_t t, const char* what) {
  const Ordering ord(g, items);
  if (!check_t_weak(ord, t).empty() || !is_alternating(ord).alternating)
    throw InternalContradiction(std::string(what) + " produced an ordering that fails verification");
}

// Sub-multisets of `ids` with `evens` even and `odds` odd elements.
void for_each_typed_subset(const Group& g, std::span<const std::uint32_t> ids, std::size_t evens, std::size_t odds,
                           const std::function<void(std::vector<std::uint32_t>&)>& f) {
  std::vector<std::uint32_t> e, o;
  for (auto id : ids) (parity_of_id(g, id) == 0 ? e : o).push_back(id);
  std::vector<std::uint32_t> pick;
  std::function<void(std::size_t, std::size_t, std::size_t, std::size_t)> rec = [&](std::size_t ei, std::size_t need_e,
                                                                                    std::size_t oi, std::size_t need_o) {
    if (need_e > 0) {
      for (std::size_t i = ei; i + need_e <= e.size(); ++i) {
        pick.push_back(e[i]);
        rec(i + 1, need_e - 1, oi, need_o);
        pick.pop_back();
      }
      return;
    }
    if (need_o > 0) {
      for (std::size_t i = oi; i + need_o <= o.size(); ++i) {
        pick.push_back(o[i]);
        rec(ei, 0, i + 1, need_o - 1);
        pick.pop_back();
      }
      return;
    }
    f(pick);
  };
  rec(0, evens, 0, odds);
}

bool certified(const Group& g, std::span<const std::uint32_t> ids,
               std::vector<std::vector<Element>>* certificate = nullptr) {
  bool ok = true;
  for (auto [ne, no] : {std::pair<std::size_t, std::size_t>{2, 2}, {1, 2}}) {
    for_each_typed_subset(g, ids, ne, no, [&](std::vector<std::uint32_t>& sub) {
      if (!ok) return;
      const auto elems = to_elements(g, sub);
      if (has_zero_sum(g, elems, OrderingClass::alternating)) {
        ok = false;
      } else if (certificate) {
        certificate->push_back(elems);
      }
    });
  }
  return ok;
}

// Five elements with parities p, 1-p, p, 1-p, p. Elements of each parity are
// taken in increasing order; a partial choice is abandoned as soon as one of
// its complete sub-multisets of type (2,2) or (1,2) has a zero sum.
ExtractedSubset extract_five(const Group& g, std::span<const Element> set, std::uint8_t first_parity) {
  const auto ids = sorted_ids(g, set);
  std::vector<std::uint32_t> chosen;
  std::function<bool(std::size_t)> rec = [&](std::size_t pos) {
    if (pos == 5) return true;
    const std::uint8_t p = static_cast<std::uint8_t>(first_parity ^ (pos % 2));
    // same-parity choices increase: positions pos-2, pos-4 hold the same parity
    const std::uint32_t floor_id = pos >= 2 ? chosen[pos - 2] + 1 : 0;
    for (auto id : ids) {
      if (parity_of_id(g, id) != p || id < floor_id) continue;
      chosen.push_back(id);
      if (certified(g, chosen) && rec(pos + 1)) return true;
      chosen.pop_back();
    }
    return false;
  };
  if (!rec(0)) throw InternalContradiction("no zero-sum-free five-element subset found");
  ExtractedSubset out;
  std::sort(chosen.begin(), chosen.end());
  out.subset = to_elements(g, chosen);
  out.type = set_type(g, out.subset);
  certified(g, chosen, &out.certificate);
  return out;
}

std::vector<std::uint32_t> sequence_t4_ids(const Group& g, std::vector<Element> set) {
  const std::size_t k = set.size();
  if (k == 8) {
    const auto found = find_sequencing_backtrack(g, set, 4, OrderingClass::alternating, 0);
    if (!found)
      throw InternalContradiction("k = 8 base case: no even-start alternating 4-weak sequencing for this set");
    std::vector<std::uint32_t> ids;
    for (const auto& e : found->items()) ids.push_back(g.id(e));
    return ids;
  }
  const auto T = extract_T23(g, set);
  auto rest = sorted_ids(g, set);
  const auto t_ids = sorted_ids(g, T.subset);
  remove_ids(rest, t_ids);
  const auto rest_elems = to_elements(g, rest);
  const auto T2 = extract_T32(g, rest_elems);
  const auto t2_ids = sorted_ids(g, T2.subset);
  remove_ids(rest, t2_ids);

  const auto inner = sequence_t4_ids(g, to_elements(g, rest));
  if (inner.size() != k - 10 || inner.size() % 2 != 0)
    throw InternalContradiction("recursion returned a misaligned ordering");
  detail::Walk walk(g, 4);
  for (auto id : inner) {
    if (!walk.fits(id)) throw InternalContradiction("recursive ordering is not 4-weak");
    walk.push(id);
  }
  std::vector<std::uint32_t> pool(t2_ids.begin(), t2_ids.end());
  if (!extend_block(g, walk, pool, 0))
    throw InternalContradiction("could not place T' after the recursive ordering (|N| odd should rule this out)");
  pool.assign(t_ids.begin(), t_ids.end());
  if (!extend_block(g, walk, pool, 1)) throw InternalContradiction("could not place T after T'");
  return {walk.items().begin(), walk.items().end()};
}

}  // namespace

bool has_zero_sum(const Group& group, std::span<const Element> subset, OrderingClass cls) {
  if (subset.size() > kMaxZeroSumCheck)
    throw PreconditionError("zero-sum check is exhaustive and limited to " + std::to_string(kMaxZeroSumCheck) +
                            " elements");
  if (subset.empty()) return false;
  const bool alternating = cls == OrderingClass::alternating;
  if (alternating && !group.has_parity()) throw PreconditionError("alternating orders need a group with parity");
  std::vector<Element> perm(subset.begin(), subset.end());
  std::sort(perm.begin(), perm.end());
  do {
    if (alternating) {
      bool alt = true;
      for (std::size_t i = 1; i < perm.size() && alt; ++i) alt = perm[i].parity != perm[i - 1].parity;
      if (!alt) continue;
    }
    Element s = group.identity();
    for (const auto& e : perm) s = group.op(s, e);
    if (s == group.identity()) return true;
  } while (std::next_permutation(perm.begin(), perm.end()));
  return false;
}

PrefixResult greedy_prefix(const Group& group, std::span<const Element> set, std::size_t h, std::size_t t,
                           const ConstructOptions& options) {
  if (t < 1) throw PreconditionError("t must be positive");
  require_proper_set(group, set);
  const std::size_t k = set.size();
  if (h + t > k + 1) throw PreconditionError("greedy prefix needs h <= k - (t - 1)");
  auto pool = sorted_ids(group, set);
  const auto prefix = build_prefix(group, pool, h, t, [](std::size_t) { return -1; }, [](std::size_t) {}, options);
  remove_ids(pool, prefix);
  return {to_elements(group, prefix), to_elements(group, pool)};
}

PrefixResult greedy_prefix_alternating(const Group& group, std::span<const Element> set, std::size_t h,
                                       std::size_t t, const ConstructOptions& options) {
  if (t < 1) throw PreconditionError("t must be positive");
  require_parity_balanced(group, set);
  const std::size_t k = set.size();
  if (k < h + t + 2) throw PreconditionError("alternating greedy prefix needs k - h >= t + 2");
  auto pool = sorted_ids(group, set);
  const std::size_t half = k / 2;
  const std::size_t limit = (t + 1) / 2;
  const auto prefix = build_prefix(
      group, pool, h, t, [](std::size_t i) { return static_cast<int>(i % 2); },
      [&](std::size_t i) {
        // positions of the same parity already used: floor(i / 2)
        const std::size_t available = half - i / 2;
        if (available <= limit)
          throw InternalContradiction("parity pool of size " + std::to_string(available) +
                                      " is not larger than ceil(t/2)");
      },
      options);
  remove_ids(pool, prefix);
  return {to_elements(group, prefix), to_elements(group, pool)};
}

Construction sequence_t3_alternating(const Group& group, std::span<const Element> set,
                                     const ConstructOptions& options) {
  require_parity_balanced(group, set);
  const std::size_t k = set.size();
  if (k < 4) throw PreconditionError("the t = 3 construction needs k >= 4");
  Construction out;
  std::vector<std::uint32_t> prefix;
  if (k > 5) {
    const auto pre = greedy_prefix_alternating(group, set, k - 5, 3, options);
    for (const auto& e : pre.prefix) prefix.push_back(group.id(e));
  }
  detail::Walk walk(group, 3);
  for (auto id : prefix) walk.push(id);
  auto pool = sorted_ids(group, set);
  remove_ids(pool, prefix);
  if (extend_block(group, walk, pool, static_cast<std::uint8_t>(prefix.size() % 2))) {
    out.items = to_elements(group, walk.items());
  } else {
    out.notes.push_back("last five positions admit no valid order after this prefix; used backtracking search");
    const auto found = find_sequencing_backtrack(group, set, 3, OrderingClass::alternating, 0);
    if (!found) throw InternalContradiction("no alternating 3-weak sequencing exists for this set");
    out.items.assign(found->items().begin(), found->items().end());
  }
  verify_construction(group, out.items, 3, "t = 3 construction");
  return out;
}

ExtractedSubset extract_T23(const Group& group, std::span<const Element> set) {
  require_parity_balanced(group, set);
  if (set.size() < 18) throw PreconditionError("extract_T23 needs k >= 18");
  return extract_five(group, set, 1);
}

ExtractedSubset extract_T32(const Group& group, std::span<const Element> set) {
  if (!group.has_parity()) throw PreconditionError("needs a group N x| Z2 with parity");
  require_proper_set(group, set);
  const std::size_t k = set.size();
  const auto type = set_type(group, set);
  if (k % 2 == 0 || type.lambda0 != (k + 1) / 2) throw PreconditionError("extract_T32 needs type ((k+1)/2, (k-1)/2)");
  if (k < 13) throw PreconditionError("extract_T32 needs k >= 13");
  return extract_five(group, set, 0);
}

ExtractedSubset extract_zero_sum_free(const Group& group, std::span<const Element> set, std::size_t max_size,
                                      std::size_t t, OrderingClass cls, std::optional<std::uint64_t> seed) {
  if (t < 1 || t > kMaxZeroSumCheck) throw PreconditionError("t must be in [1, 8]");
  require_proper_set(group, set);
  const bool alternating = cls == OrderingClass::alternating;
  if (alternating && !group.has_parity()) throw PreconditionError("alternating orders need a group with parity");
  auto pool = sorted_ids(group, set);
  if (seed) {
    Rng rng(*seed);
    rng.shuffle(std::span(pool));
  }

  std::vector<std::uint32_t> chosen;
  // True when some sub-multiset containing `x` and at most t-1 chosen
  // elements has a zero sum.
  auto creates_zero_sum = [&](std::uint32_t x) {
    std::vector<Element> pick{group.element(x)};
    std::function<bool(std::size_t)> rec = [&](std::size_t from) {
      if (has_zero_sum(group, pick, cls)) return true;
      if (pick.size() == t) return false;
      for (std::size_t i = from; i < chosen.size(); ++i) {
        pick.push_back(group.element(chosen[i]));
        if (rec(i + 1)) return true;
        pick.pop_back();
      }
      return false;
    };
    return rec(0);
  };

  while (chosen.size() < max_size) {
    const int want = alternating ? static_cast<int>(chosen.size() % 2) : -1;
    bool added = false;
    for (auto id : pool) {
      if (want >= 0 && parity_of_id(group, id) != want) continue;
      if (std::find(chosen.begin(), chosen.end(), id) != chosen.end()) continue;
      if (creates_zero_sum(id)) continue;
      chosen.push_back(id);
      added = true;
      break;
    }
    if (!added) break;
  }
  if (alternating && chosen.size() % 2 != 0) chosen.pop_back();

  ExtractedSubset out;
  std::sort(chosen.begin(), chosen.end());
  out.subset = to_elements(group, chosen);
  if (group.has_parity()) out.type = set_type(group, out.subset);
  std::vector<Element> pick;
  std::function<void(std::size_t)> rec = [&](std::size_t from) {
    if (!pick.empty()) out.certificate.push_back(pick);
    if (pick.size() == t) return;
    for (std::size_t i = from; i < out.subset.size(); ++i) {
      pick.push_back(out.subset[i]);
      rec(i + 1);
      pick.pop_back();
    }
  };
  rec(0);
  return out;
}

Construction sequence_t4_alternating(const Group& group, std::span<const Element> set) {
  require_parity_balanced(group, set);
  if (group.inner_order() % 2 == 0) throw PreconditionError("the t = 4 construction needs |N| odd");
  const std::size_t k = set.size();
  if (k % 10 != 8) throw PreconditionError("the t = 4 construction needs k = 8 (mod 10), got k = " + std::to_string(k));
  Construction out;
  const auto ids = sequence_t4_ids(group, {set.begin(), set.end()});
  out.items = to_elements(group, ids);
  verify_construction(group, out.items, 4, "t = 4 construction");
  return out;
}

}  // namespace seqlab

namespace seqlab {

InstanceAttempt make_estimate_instance(const Group& group, std::size_t t, std::size_t ell, BoundVariant variant,
                                       std::uint64_t seed, std::size_t attempts) {
  if (t < 1) throw PreconditionError("t must be positive");
  const bool balanced = variant == BoundVariant::balanced;
  if (balanced && !group.has_parity()) throw PreconditionError("balanced variant needs a group with parity");
  if (balanced && ell % 2 != 0) throw PreconditionError("balanced variant needs an even ell");
  const OrderingClass cls = balanced ? OrderingClass::alternating : OrderingClass::any;
  const std::size_t extra = balanced ? t + 2 : t - 1;
  const std::size_t h = t;

  InstanceAttempt out;
  std::vector<Element> all;
  for (const auto& e : group.elements())
    if (!(e == group.identity())) all.push_back(e);
  if (ell + h + extra > all.size()) {
    out.reason = "ell + " + std::to_string(h + extra) + " exceeds the " + std::to_string(all.size()) +
                 " non-identity elements";
    return out;
  }

  for (std::size_t a = 0; a <= attempts; ++a) {
    std::optional<std::uint64_t> s;
    if (a > 0) s = Rng::derive(seed, a - 1);
    ++out.attempts;
    auto T = extract_zero_sum_free(group, all, ell, t, cls, s);
    out.best_reserved = std::max(out.best_reserved, T.subset.size());
    if (T.subset.size() < ell) continue;

    // U from the rest, canonical order; balanced keeps equal parity counts.
    std::vector<Element> U;
    std::size_t need[2] = {0, 0};
    if (balanced) need[0] = need[1] = (h + extra) / 2;
    for (const auto& e : all) {
      if (std::find(T.subset.begin(), T.subset.end(), e) != T.subset.end()) continue;
      if (balanced) {
        if (need[e.parity] == 0) continue;
        --need[e.parity];
      } else if (U.size() == h + extra) {
        break;
      }
      U.push_back(e);
    }
    if (U.size() != h + extra) {
      out.reason = "not enough elements left for U";
      return out;
    }
    const auto pre = balanced ? greedy_prefix_alternating(group, U, h, t) : greedy_prefix(group, U, h, t);
    EstimateInstance inst;
    inst.set = U;
    inst.set.insert(inst.set.end(), T.subset.begin(), T.subset.end());
    std::sort(inst.set.begin(), inst.set.end());
    inst.reserved = T.subset;
    inst.prefix = pre.prefix;
    inst.extraction_seed = s;
    out.instance = std::move(inst);
    return out;
  }
  out.reason = "extraction reached |T| = " + std::to_string(out.best_reserved) + " < " + std::to_string(ell);
  return out;
}

}  // namespace seqlab
