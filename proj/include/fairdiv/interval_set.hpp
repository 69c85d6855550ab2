#pragma once

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fairdiv/rational.hpp"

namespace fairdiv {

// Half-open slice [lo, hi) of the unit cake. Never empty: lo < hi.
struct HalfOpenInterval {
  Rational lo;
  Rational hi;

  Rational length() const { return hi - lo; }
  bool operator==(const HalfOpenInterval&) const = default;
};

/// A finite union of half-open intervals within [0,1), held in canonical
/// form: sorted, pairwise disjoint, adjacent intervals merged, empty
/// intervals dropped. Canonical form makes structural equality coincide with
/// equality as sets.
class IntervalSet {
 public:
  IntervalSet() = default;

  explicit IntervalSet(std::vector<HalfOpenInterval> raw) {
    for (const auto& iv : raw) {
      if (iv.lo < 0 || iv.hi > 1)
        throw std::invalid_argument("interval endpoints must lie in [0,1]");
      if (iv.lo > iv.hi) throw std::invalid_argument("interval has lo > hi");
    }
    std::erase_if(raw, [](const HalfOpenInterval& iv) { return iv.lo == iv.hi; });
    std::sort(raw.begin(), raw.end(), [](const auto& a, const auto& b) {
      return a.lo != b.lo ? a.lo < b.lo : a.hi < b.hi;
    });
    for (auto& iv : raw) {
      if (!intervals_.empty() && intervals_.back().hi >= iv.lo)
        intervals_.back().hi = std::max(intervals_.back().hi, iv.hi);
      else
        intervals_.push_back(std::move(iv));
    }
  }

  static IntervalSet unit() { return IntervalSet({{Rational(0), Rational(1)}}); }

  bool empty() const { return intervals_.empty(); }
  const std::vector<HalfOpenInterval>& intervals() const { return intervals_; }

  Rational total_length() const {
    Rational sum = 0;
    for (const auto& iv : intervals_) sum += iv.length();
    return sum;
  }

  bool operator==(const IntervalSet&) const = default;

 private:
  std::vector<HalfOpenInterval> intervals_;
};

inline IntervalSet set_union(const IntervalSet& a, const IntervalSet& b) {
  auto merged = a.intervals();
  merged.insert(merged.end(), b.intervals().begin(), b.intervals().end());
  return IntervalSet(std::move(merged));
}

inline IntervalSet set_intersection(const IntervalSet& a, const IntervalSet& b) {
  std::vector<HalfOpenInterval> out;
  const auto& av = a.intervals();
  const auto& bv = b.intervals();
  size_t i = 0, j = 0;
  while (i < av.size() && j < bv.size()) {
    const Rational lo = std::max(av[i].lo, bv[j].lo);
    const Rational hi = std::min(av[i].hi, bv[j].hi);
    if (lo < hi) out.push_back({lo, hi});
    if (av[i].hi <= bv[j].hi)
      ++i;
    else
      ++j;
  }
  return IntervalSet(std::move(out));
}

inline IntervalSet set_difference(const IntervalSet& a, const IntervalSet& b) {
  std::vector<HalfOpenInterval> out;
  const auto& av = a.intervals();
  const auto& bv = b.intervals();
  size_t j = 0;
  for (const auto& ia : av) {
    while (j < bv.size() && bv[j].hi <= ia.lo) ++j;
    Rational cur = ia.lo;
    size_t jj = j;
    while (jj < bv.size() && bv[jj].lo < ia.hi) {
      if (bv[jj].lo > cur) out.push_back({cur, bv[jj].lo});
      cur = std::max(cur, bv[jj].hi);
      if (cur >= ia.hi) break;
      ++jj;
    }
    if (cur < ia.hi) out.push_back({cur, ia.hi});
  }
  return IntervalSet(std::move(out));
}

inline IntervalSet set_symmetric_difference(const IntervalSet& a, const IntervalSet& b) {
  return set_union(set_difference(a, b), set_difference(b, a));
}

inline IntervalSet complement(const IntervalSet& a) {
  return set_difference(IntervalSet::unit(), a);
}

inline bool sets_disjoint(const IntervalSet& a, const IntervalSet& b) {
  return set_intersection(a, b).empty();
}

}  // namespace fairdiv
