#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "seqlab/groups.hpp"

namespace seqlab {

// A duplicate-free ordering of non-identity elements of a group. Holds a
// pointer to the group, which must outlive the ordering.
class Ordering {
 public:
  // Throws PreconditionError on duplicates, identity, or foreign elements.
  Ordering(const Group& group, std::vector<Element> items);

  const Group& group() const { return *group_; }
  std::span<const Element> items() const { return items_; }
  std::size_t size() const { return items_.size(); }

 private:
  const Group* group_;
  std::vector<Element> items_;
};

// s_0 = identity, s_i = s_{i-1} + y_i.
using PartialSumTrace = std::vector<Element>;

struct TypeVector {
  std::size_t lambda0 = 0;  // even elements
  std::size_t lambda1 = 0;  // odd elements

  bool balanced() const { return lambda0 == lambda1; }
  friend bool operator==(const TypeVector&, const TypeVector&) = default;
};

// A pair of equal partial sums s_i = s_j with 1 <= j - i <= t.
struct WindowConflict {
  std::size_t i = 0;
  std::size_t j = 0;

  friend auto operator<=>(const WindowConflict&, const WindowConflict&) = default;
};

struct AlternationReport {
  bool alternating = true;
  // Parity of the first element; empty for the empty ordering.
  std::optional<std::uint8_t> start_parity;
};

PartialSumTrace partial_sums(const Ordering& ord);

// All window conflicts in lexicographic (i, j) order; empty iff ord is a
// t-weak sequencing. Sliding exact comparison over the last t partial sums.
std::vector<WindowConflict> check_t_weak(const Ordering& ord, std::size_t t);

// Same contract, computed independently by summing each segment
// y_{i+1} + ... + y_j and comparing with the identity.
std::vector<WindowConflict> check_t_weak_by_segments(const Ordering& ord, std::size_t t);

// Requires parity structure.
AlternationReport is_alternating(const Ordering& ord);

// Requires parity structure; rejects duplicates and the identity.
TypeVector set_type(const Group& group, std::span<const Element> set);

// Shared validation: elements in group, pairwise distinct, none the identity.
void require_proper_set(const Group& group, std::span<const Element> set);

}  // namespace seqlab
