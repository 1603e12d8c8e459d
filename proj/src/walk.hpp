#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "seqlab/groups.hpp"

namespace seqlab::detail {

// An ordering under construction, kept as dense ids together with its
// partial sums so that each extension is checked against the last t sums.
class Walk {
 public:
  Walk(const Group& group, std::size_t t) : group_(&group), t_(t) { sums_.push_back(group.id(group.identity())); }

  std::size_t length() const { return items_.size(); }
  std::span<const std::uint32_t> items() const { return items_; }
  std::uint32_t last_sum() const { return sums_.back(); }

  // True when appending y creates no window conflict of length <= t.
  bool fits(std::uint32_t y) const {
    const std::uint32_t s = group_->op_id(sums_.back(), y);
    const std::size_t j = sums_.size();
    for (std::size_t i = j > t_ ? j - t_ : 0; i < j; ++i)
      if (sums_[i] == s) return false;
    return true;
  }

  void push(std::uint32_t y) {
    sums_.push_back(group_->op_id(sums_.back(), y));
    items_.push_back(y);
  }

  void pop() {
    sums_.pop_back();
    items_.pop_back();
  }

 private:
  const Group* group_;
  std::size_t t_;
  std::vector<std::uint32_t> sums_;
  std::vector<std::uint32_t> items_;
};

}  // namespace seqlab::detail
