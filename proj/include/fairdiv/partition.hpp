#pragma once

#include <stdexcept>
#include <utility>
#include <vector>

#include "fairdiv/interval_set.hpp"

namespace fairdiv {

/// A list of pairwise disjoint interval sets whose union is exactly [0,1).
/// Parts may be empty. Validated on construction: lengths summing to 1
/// together with the union covering the cake rules out any overlap.
class Partition {
 public:
  explicit Partition(std::vector<IntervalSet> parts) : parts_(std::move(parts)) {
    if (parts_.empty())
      throw std::invalid_argument("partition needs at least one part");
    Rational length_sum = 0;
    std::vector<HalfOpenInterval> all;
    for (const auto& part : parts_) {
      length_sum += part.total_length();
      all.insert(all.end(), part.intervals().begin(), part.intervals().end());
    }
    if (length_sum != 1 || IntervalSet(std::move(all)) != IntervalSet::unit())
      throw std::invalid_argument("parts must be disjoint and cover [0,1) exactly");
  }

  size_t size() const { return parts_.size(); }
  const std::vector<IntervalSet>& parts() const { return parts_; }
  const IntervalSet& part(size_t i) const { return parts_.at(i); }

  bool operator==(const Partition&) const = default;

 private:
  std::vector<IntervalSet> parts_;
};

}  // namespace fairdiv
