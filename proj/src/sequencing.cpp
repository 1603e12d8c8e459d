#include "seqlab/sequencing.hpp"

#include <algorithm>

#include "seqlab/errors.hpp"

namespace seqlab {

void require_proper_set(const Group& group, std::span<const Element> set) {
  std::vector<bool> seen(group.size());
  for (const auto& e : set) {
    if (!group.contains(e)) throw PreconditionError("element " + to_string(e, true) + " is not in the group");
    if (e == group.identity()) throw PreconditionError("set contains the identity");
    const auto id = group.id(e);
    if (seen[id]) throw PreconditionError("duplicate element " + to_string(e, group.has_parity()));
    seen[id] = true;
  }
}

Ordering::Ordering(const Group& group, std::vector<Element> items) : group_(&group), items_(std::move(items)) {
  require_proper_set(group, items_);
}

PartialSumTrace partial_sums(const Ordering& ord) {
  const Group& g = ord.group();
  PartialSumTrace sums;
  sums.reserve(ord.size() + 1);
  sums.push_back(g.identity());
  for (const auto& y : ord.items()) sums.push_back(g.op(sums.back(), y));
  return sums;
}

std::vector<WindowConflict> check_t_weak(const Ordering& ord, std::size_t t) {
  if (t < 1) throw PreconditionError("t must be positive");
  const auto sums = partial_sums(ord);
  std::vector<WindowConflict> out;
  for (std::size_t j = 1; j < sums.size(); ++j) {
    const std::size_t lo = j > t ? j - t : 0;
    for (std::size_t i = lo; i < j; ++i)
      if (sums[i] == sums[j]) out.push_back({i, j});
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<WindowConflict> check_t_weak_by_segments(const Ordering& ord, std::size_t t) {
  if (t < 1) throw PreconditionError("t must be positive");
  const Group& g = ord.group();
  const auto items = ord.items();
  std::vector<WindowConflict> out;
  for (std::size_t i = 0; i < items.size(); ++i) {
    Element seg = g.identity();
    for (std::size_t j = i + 1; j <= items.size() && j - i <= t; ++j) {
      seg = g.op(seg, items[j - 1]);
      if (seg == g.identity()) out.push_back({i, j});
    }
  }
  return out;
}

AlternationReport is_alternating(const Ordering& ord) {
  const Group& g = ord.group();
  AlternationReport report;
  const auto items = ord.items();
  if (!g.has_parity()) throw PreconditionError(g.description() + " has no parity structure");
  if (items.empty()) return report;
  report.start_parity = g.parity(items.front());
  for (std::size_t i = 1; i < items.size(); ++i)
    if (g.parity(items[i]) == g.parity(items[i - 1])) report.alternating = false;
  return report;
}

TypeVector set_type(const Group& group, std::span<const Element> set) {
  if (!group.has_parity()) throw PreconditionError(group.description() + " has no parity structure");
  require_proper_set(group, set);
  TypeVector type;
  for (const auto& e : set) (e.parity == 0 ? type.lambda0 : type.lambda1)++;
  return type;
}

}  // namespace seqlab
