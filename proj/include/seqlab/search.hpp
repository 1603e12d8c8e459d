#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include <gmpxx.h>

#include "seqlab/groups.hpp"
#include "seqlab/sequencing.hpp"

namespace seqlab {

enum class OrderingClass { any, alternating };

std::string to_string(OrderingClass c);

// Depth-first search for a t-weak ordering of `set`, extending only while the
// newest partial sum differs from the previous t. Candidates are tried in
// canonical element order. Alternating mode needs a balanced set; it tries an
// even start first unless `start_parity` fixes it. Returns nullopt once the
// space is exhausted.
std::optional<Ordering> find_sequencing_backtrack(const Group& group, std::span<const Element> set, std::size_t t,
                                                  OrderingClass cls,
                                                  std::optional<std::uint8_t> start_parity = std::nullopt);

// Balanced subsets of G \ {identity} with k/2 even and k/2 odd elements, in
// lexicographic order of their canonically sorted element lists.
class BalancedSubsets {
 public:
  BalancedSubsets(const Group& group, std::size_t k);

  std::size_t k() const { return k_; }
  // C(|N| - 1, k/2) * C(|N|, k/2).
  const mpz_class& count() const { return count_; }
  // The subset of lexicographic rank r (0-based); r < count().
  std::vector<Element> unrank(std::uint64_t r) const;
  // Calls f on ranks [first, last) in order; stops early if f returns false.
  void for_each(std::uint64_t first, std::uint64_t last,
                const std::function<bool(std::span<const Element>)>& f) const;

 private:
  const Group* group_;
  std::size_t k_;
  std::size_t half_;
  mpz_class count_;
  std::uint64_t odd_count_ = 0;  // C(|N|, k/2), when it fits
};

inline constexpr std::uint64_t kDefaultEnumerationCap = 10'000'000;

struct VerifyAllOptions {
  std::size_t t = 1;
  OrderingClass cls = OrderingClass::alternating;
  unsigned jobs = 1;
  std::uint64_t cap = kDefaultEnumerationCap;
  // Seeded uniform sample of this many distinct subsets instead of all.
  std::optional<std::uint64_t> sample;
  std::uint64_t seed = 0;
};

struct SearchReport {
  std::string group;
  std::size_t k = 0;
  std::size_t t = 0;
  OrderingClass cls = OrderingClass::alternating;
  std::string method;
  mpz_class subsets_total;
  std::uint64_t subsets_checked = 0;
  bool sampled = false;
  std::uint64_t seed = 0;
  unsigned jobs = 1;
  std::vector<std::vector<Element>> failures;  // in rank (or sample) order
  double elapsed_ms = 0;
};

// Per-subset check used by verify_all: true when the subset passes.
using SubsetCheck = std::function<bool(const Group&, std::span<const Element>)>;

// Runs `check` (default: find_sequencing_backtrack) over every balanced
// k-subset, or over a sample. Work is split into chunks by rank and merged in
// chunk order, so the report does not depend on `jobs`.
SearchReport verify_all(const Group& group, std::size_t k, const VerifyAllOptions& options,
                        const SubsetCheck& check = {}, const std::string& method = "backtrack");

enum class BoundVariant { plain, balanced };

std::string to_string(BoundVariant v);

struct BoundParams {
  int t = 1;
  std::int64_t ell = 2;
  BoundVariant variant = BoundVariant::plain;
};

// Closed-form upper bounds on the expected number of window collisions of a
// random extension:
//   plain:    t^2/l + t(l+t)/l * (1 - (l-t+1)^t / (l+t)^t),        l >= t+1
//   balanced: 2t^2/(l+2) + 2t(l+t+2)/(l+2) * (1 - (l-t)^t/(l+t+2)^t), l even
mpq_class bound_E(const BoundParams& params);

struct EstimateResult {
  std::uint64_t samples = 0;
  std::uint64_t seed = 0;
  double mean = 0;
  double stddev = 0;
  double std_error = 0;
  double ci95_low = 0;
  double ci95_high = 0;
  std::uint64_t max_collisions = 0;
  std::uint64_t zero_collision_samples = 0;
};

// Samples uniformly random extensions of `prefix` by the rest of `set`
// (alternating ones for the balanced variant, continuing the prefix's parity
// pattern, even start when the prefix is empty) and counts window collision
// pairs (i, j), j - i <= t, over the whole ordering. `reserved` must lie in
// set \ prefix and contain no zero-sum sub-multiset of size <= t (in
// alternating orders for the balanced variant); it is checked, not used.
EstimateResult estimate_collision_expectation(const Group& group, std::span<const Element> set,
                                              std::span<const Element> reserved, std::span<const Element> prefix,
                                              std::size_t t, std::uint64_t samples, std::uint64_t seed,
                                              BoundVariant variant, unsigned jobs = 1);

}  // namespace seqlab
