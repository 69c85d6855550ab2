#pragma once

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fairdiv/interval_set.hpp"
#include "fairdiv/rational.hpp"

namespace fairdiv {

/// Non-atomic probability measure on [0,1) with a piecewise-constant density:
/// rational breakpoints 0 = b_0 < ... < b_c = 1 and one non-negative rational
/// density per cell, integrating to exactly 1.
class StepMeasure {
 public:
  StepMeasure(std::vector<Rational> breakpoints, std::vector<Rational> densities)
      : breakpoints_(std::move(breakpoints)), densities_(std::move(densities)) {
    if (breakpoints_.size() < 2 || breakpoints_.front() != 0 || breakpoints_.back() != 1)
      throw std::invalid_argument("breakpoints must run from 0 to 1");
    for (size_t c = 0; c + 1 < breakpoints_.size(); ++c)
      if (!(breakpoints_[c] < breakpoints_[c + 1]))
        throw std::invalid_argument("breakpoints must be strictly increasing");
    if (densities_.size() + 1 != breakpoints_.size())
      throw std::invalid_argument("need exactly one density per cell");
    Rational mass = 0;
    for (size_t c = 0; c < densities_.size(); ++c) {
      if (densities_[c] < 0)
        throw std::invalid_argument("densities must be non-negative");
      mass += densities_[c] * (breakpoints_[c + 1] - breakpoints_[c]);
    }
    if (mass != 1)
      throw std::invalid_argument("measure must integrate to exactly 1, got " +
                                  format_rational(mass));
  }

  static StepMeasure uniform() {
    return StepMeasure({Rational(0), Rational(1)}, {Rational(1)});
  }

  size_t cells() const { return densities_.size(); }
  const std::vector<Rational>& breakpoints() const { return breakpoints_; }
  const std::vector<Rational>& densities() const { return densities_; }

  Rational max_density() const {
    return *std::max_element(densities_.begin(), densities_.end());
  }

  // Density on the cell containing x, for x in [0,1).
  const Rational& density_at(const Rational& x) const {
    const size_t next = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), x) -
                        breakpoints_.begin();
    return densities_.at(next - 1);
  }

  // Structural equality; use measures_equal to compare as measures.
  bool operator==(const StepMeasure&) const = default;

 private:
  std::vector<Rational> breakpoints_;
  std::vector<Rational> densities_;
};

inline Rational measure_of(const StepMeasure& m, const HalfOpenInterval& iv) {
  const auto& bp = m.breakpoints();
  size_t cell =
      static_cast<size_t>(std::upper_bound(bp.begin(), bp.end(), iv.lo) - bp.begin()) - 1;
  Rational total = 0;
  for (; cell < m.cells() && bp[cell] < iv.hi; ++cell) {
    const Rational lo = std::max(bp[cell], iv.lo);
    const Rational hi = std::min(bp[cell + 1], iv.hi);
    if (lo < hi) total += m.densities()[cell] * (hi - lo);
  }
  return total;
}

inline Rational measure_of(const StepMeasure& m, const IntervalSet& s) {
  Rational total = 0;
  for (const auto& iv : s.intervals()) total += measure_of(m, iv);
  return total;
}

// Sorted, deduplicated union of all breakpoint lists. Every input measure has
// constant density on every cell of the result.
inline std::vector<Rational> common_refinement(const std::vector<StepMeasure>& measures) {
  if (measures.empty()) throw std::invalid_argument("need at least one measure");
  std::vector<Rational> points;
  for (const auto& m : measures)
    points.insert(points.end(), m.breakpoints().begin(), m.breakpoints().end());
  std::sort(points.begin(), points.end());
  points.erase(std::unique(points.begin(), points.end()), points.end());
  return points;
}

// Equality as measures: identical density on every cell of the common
// refinement.
inline bool measures_equal(const StepMeasure& a, const StepMeasure& b) {
  const auto grid = common_refinement({a, b});
  for (size_t c = 0; c + 1 < grid.size(); ++c)
    if (a.density_at(grid[c]) != b.density_at(grid[c])) return false;
  return true;
}

}  // namespace fairdiv
