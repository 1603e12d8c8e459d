#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "seqlab/groups.hpp"
#include "seqlab/search.hpp"
#include "seqlab/sequencing.hpp"

namespace seqlab {

// True iff some ordering of `subset` (an alternating one, when requested)
// sums to the identity. Exhaustive over permutations; at most 8 elements.
// The empty subset has no zero sum by convention.
bool has_zero_sum(const Group& group, std::span<const Element> subset, OrderingClass cls);

struct ConstructOptions {
  // Unset: always take the least valid candidate. Set: seeded random choice.
  std::optional<std::uint64_t> seed;
};

struct PrefixResult {
  std::vector<Element> prefix;
  std::vector<Element> remainder;  // canonical order
};

// Ordering of h elements of `set` whose windows of length <= t (all inside the
// prefix) are conflict-free. Needs h <= k - (t - 1).
PrefixResult greedy_prefix(const Group& group, std::span<const Element> set, std::size_t h, std::size_t t,
                           const ConstructOptions& options = {});

// Alternating version starting with an even element. Needs a balanced set and
// k - h >= t + 2, which keeps every parity pool larger than ceil(t/2).
PrefixResult greedy_prefix_alternating(const Group& group, std::span<const Element> set, std::size_t h,
                                       std::size_t t, const ConstructOptions& options = {});

struct Construction {
  std::vector<Element> items;
  // Steps that went beyond the plain argument (backtracking, fallbacks).
  std::vector<std::string> notes;
};

// Alternating 3-weak sequencing of a balanced set of size k >= 4 in a group
// with parity: greedy alternating prefix of length k - 5, then the last five
// positions (odd, even, odd, even, odd) chosen so that every window ending
// there stays nonzero. The result is checked before returning.
Construction sequence_t3_alternating(const Group& group, std::span<const Element> set,
                                     const ConstructOptions& options = {});

struct ExtractedSubset {
  std::vector<Element> subset;
  TypeVector type;
  // Every sub-multiset whose alternating orderings were all checked nonzero.
  std::vector<std::vector<Element>> certificate;
};

// Five elements, odd/even/odd/even/odd (type (2,3)), with no alternating
// zero-sum sub-multiset of type (2,2) or (1,2). Needs a balanced set, k >= 18.
ExtractedSubset extract_T23(const Group& group, std::span<const Element> set);

// Five elements, even/odd/even/odd/even (type (3,2)), same certificate. Needs
// type ((k+1)/2, (k-1)/2) with k >= 13.
ExtractedSubset extract_T32(const Group& group, std::span<const Element> set);

// Greedy subset of at most `max_size` elements with no zero-sum sub-multiset of
// size <= t (in alternating orders when requested; then even and odd elements
// are added in turn so the result stays balanced). Candidates are visited in
// canonical order, or shuffled by `seed`.
ExtractedSubset extract_zero_sum_free(const Group& group, std::span<const Element> set, std::size_t max_size,
                                      std::size_t t, OrderingClass cls, std::optional<std::uint64_t> seed = {});

// Alternating 4-weak sequencing, even start, for a balanced set with
// k = 8 (mod 10) when |N| is odd. k = 8 by backtracking search; k >= 18 by
// peeling off T (2,3) and T' (3,2), recursing on the rest, and appending T'
// then T.
Construction sequence_t4_alternating(const Group& group, std::span<const Element> set);

struct EstimateInstance {
  std::vector<Element> set;
  std::vector<Element> reserved;  // T, |T| = ell
  std::vector<Element> prefix;    // length t, window-conflict-free
  // Seed of the extraction run that reached |T| = ell (unset: canonical order).
  std::optional<std::uint64_t> extraction_seed;
};

struct InstanceAttempt {
  std::optional<EstimateInstance> instance;
  std::size_t best_reserved = 0;  // largest T the extraction reached
  std::size_t attempts = 0;
  std::string reason;             // why there is no instance
};

// Builds S = U + T for the collision estimator: T is a zero-sum-free subset of
// size ell from extract_zero_sum_free (canonical order first, then seeds
// derived from `seed`), U is taken from the remaining elements with a greedy
// prefix of length t and t - 1 (plain) or t + 2 (balanced) further elements.
InstanceAttempt make_estimate_instance(const Group& group, std::size_t t, std::size_t ell, BoundVariant variant,
                                       std::uint64_t seed, std::size_t attempts = 64);

}  // namespace seqlab
