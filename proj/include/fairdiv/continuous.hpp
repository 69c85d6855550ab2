#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <utility>
#include <vector>

#include "fairdiv/partition.hpp"
#include "fairdiv/rng.hpp"
#include "fairdiv/step_measure.hpp"

namespace fairdiv {

struct ContinuousAllocation {
  std::vector<IntervalSet> pieces;  // pieces[i] goes to player i
  std::optional<std::vector<size_t>> permutation_used;
  bool superfair_accepted = false;
};

/// Tuning for the rational-partition sampler. The grid denominator d is drawn
/// geometrically (halting probability per step, so every d >= 1 has positive
/// probability), then each of the d cells gets an independent uniform owner.
/// Every partition into finite unions of rational half-open intervals has a
/// common grid denominator and therefore positive draw probability.
struct QSamplerConfig {
  Rational denominator_halting = Rational(1, 2);  // strictly between 0 and 1
  uint64_t rng_seed = 0;
};

/// The split every mechanism falls back to: on the common refinement of the
/// declared measures every cell is cut into k equal-length slots and part j
/// collects the j-th slot of every cell. Each declared density is constant
/// per cell, so every part is worth exactly 1/k to every declared measure.
inline Partition equal_partition(const std::vector<StepMeasure>& declared) {
  if (declared.empty())
    throw std::invalid_argument("equal_partition needs at least one measure");
  const size_t k = declared.size();
  const auto grid = common_refinement(declared);
  std::vector<std::vector<HalfOpenInterval>> slots(k);
  for (size_t c = 0; c + 1 < grid.size(); ++c) {
    const Rational width = (grid[c + 1] - grid[c]) / Integer(k);
    Rational left = grid[c];
    for (size_t j = 0; j < k; ++j) {
      const Rational right = (j + 1 == k) ? grid[c + 1] : Rational(left + width);
      slots[j].push_back({left, right});
      left = right;
    }
  }
  std::vector<IntervalSet> parts;
  parts.reserve(k);
  for (auto& s : slots) parts.emplace_back(std::move(s));
  return Partition(std::move(parts));
}

/// Equal split plus a uniformly random permutation of the pieces. A player's
/// expected value is her measure of the whole cake over k no matter what she
/// declares; declaring truthfully pins the realized value to exactly 1/k.
inline ContinuousAllocation mechanism1(const std::vector<StepMeasure>& declared,
                                       uint64_t seed) {
  const Partition split = equal_partition(declared);
  SeedStream stream = SeedStream(seed).child("permutation");
  std::vector<size_t> tau = stream.permutation(declared.size());
  ContinuousAllocation out;
  out.pieces.reserve(tau.size());
  for (size_t i = 0; i < tau.size(); ++i) out.pieces.push_back(split.part(tau[i]));
  out.permutation_used = std::move(tau);
  out.superfair_accepted = false;
  return out;
}

// Partition of [0,1) into k parts induced by giving grid cell t of width
// 1/denominator to part labels[t].
inline Partition uniform_grid_partition(uint64_t denominator,
                                        const std::vector<size_t>& labels, size_t k) {
  if (k == 0) throw std::invalid_argument("need at least one part");
  if (denominator == 0 || labels.size() != denominator)
    throw std::invalid_argument("need one label per grid cell");
  std::vector<std::vector<HalfOpenInterval>> cells(k);
  for (uint64_t t = 0; t < denominator; ++t) {
    if (labels[t] >= k) throw std::invalid_argument("cell label out of range");
    cells[labels[t]].push_back({Rational(Integer(t), Integer(denominator)),
                                Rational(Integer(t + 1), Integer(denominator))});
  }
  std::vector<IntervalSet> parts;
  parts.reserve(k);
  for (auto& c : cells) parts.emplace_back(std::move(c));
  return Partition(std::move(parts));
}

inline Partition sample_rational_partition(size_t k, const QSamplerConfig& config) {
  if (k == 0) throw std::invalid_argument("need at least one part");
  if (!(config.denominator_halting > 0 && config.denominator_halting < 1))
    throw std::invalid_argument("denominator_halting must lie strictly between 0 and 1");
  SeedStream stream = SeedStream(config.rng_seed).child("draw");
  const uint64_t d = stream.geometric(config.denominator_halting);
  std::vector<size_t> labels(d);
  for (auto& label : labels)
    label = static_cast<size_t>(stream.below(static_cast<uint64_t>(k)));
  return uniform_grid_partition(d, labels, k);
}

// Strict test: every player values her own part at more than 1/k. Exact
// comparisons; a value of exactly 1/k rejects.
inline bool is_superfair(const std::vector<StepMeasure>& measures, const Partition& p) {
  if (measures.size() != p.size())
    throw std::invalid_argument("measure count does not match partition arity");
  const Rational threshold(1, Integer(measures.size()));
  for (size_t i = 0; i < measures.size(); ++i)
    if (!(measure_of(measures[i], p.part(i)) > threshold)) return false;
  return true;
}

/// One draw from the rational-partition sampler; keep it when every declared
/// measure strictly exceeds 1/k on its own part, otherwise fall back to the
/// random equal split. The fallback uses an independent stream derived from
/// the master seed, so the acceptance check cannot bias the permutation.
/// Exactly one draw: accepting the best of several draws would let a player
/// veto an early acceptance by lying, breaking truthfulness.
inline ContinuousAllocation mechanism2(const std::vector<StepMeasure>& declared,
                                       const QSamplerConfig& config) {
  if (declared.empty())
    throw std::invalid_argument("mechanism2 needs at least one measure");
  const Partition drawn = sample_rational_partition(declared.size(), config);
  if (is_superfair(declared, drawn)) {
    ContinuousAllocation out;
    out.pieces = drawn.parts();
    out.superfair_accepted = true;
    return out;
  }
  ContinuousAllocation out =
      mechanism1(declared, SeedStream(config.rng_seed).child("fallback").seed());
  out.superfair_accepted = false;
  return out;
}

// Target part with arbitrary real endpoints, as handed in by callers working
// outside the rational universe.
struct RealInterval {
  double lo;
  double hi;
};

/// Rational approximation of an arbitrary real-endpoint partition: round each
/// endpoint to the closest rational on a fine denominator bound, let the
/// first part absorb anything the rounded parts fail to cover, then strip
/// from each part whatever an earlier part already claimed. Endpoints move by
/// strictly less than delta / (2 * max density * k * #intervals) each, which
/// keeps every per-part symmetric difference below delta even after the
/// repair. The result is always an exact partition, however degenerate the
/// input.
inline Partition approximate_by_rational_partition(
    const std::vector<std::vector<RealInterval>>& target,
    const std::vector<StepMeasure>& measures, const Rational& delta) {
  const size_t k = target.size();
  if (k == 0) throw std::invalid_argument("target needs at least one part");
  if (measures.size() != k)
    throw std::invalid_argument("need one measure per target part");
  if (!(delta > 0)) throw std::invalid_argument("delta must be positive");

  size_t interval_count = 0;
  for (const auto& part : target)
    for (const auto& iv : part) {
      if (!std::isfinite(iv.lo) || !std::isfinite(iv.hi))
        throw std::invalid_argument("target endpoints must be finite");
      if (iv.lo < 0.0 || iv.hi > 1.0 || iv.lo > iv.hi)
        throw std::invalid_argument("target endpoints must satisfy 0 <= lo <= hi <= 1");
      ++interval_count;
    }
  if (interval_count == 0) interval_count = 1;

  Rational max_density = 1;
  for (const auto& m : measures)
    max_density = std::max(max_density, m.max_density());

  const Rational move_bound =
      delta / (2 * max_density * Integer(k) * Integer(interval_count));
  const Rational inverse = 1 / (2 * move_bound);
  const Integer max_den = numerator(inverse) / denominator(inverse) + 1;

  std::vector<IntervalSet> rounded(k);
  for (size_t j = 0; j < k; ++j) {
    std::vector<HalfOpenInterval> pieces;
    for (const auto& iv : target[j]) {
      Rational lo = best_rational_in_unit(rational_from_double(iv.lo), max_den);
      Rational hi = best_rational_in_unit(rational_from_double(iv.hi), max_den);
      if (lo < hi) pieces.push_back({std::move(lo), std::move(hi)});
    }
    rounded[j] = IntervalSet(std::move(pieces));
  }

  IntervalSet covered;
  for (const auto& r : rounded) covered = set_union(covered, r);
  rounded[0] = set_union(rounded[0], complement(covered));

  std::vector<IntervalSet> parts(k);
  IntervalSet used;
  for (size_t j = 0; j < k; ++j) {
    parts[j] = set_difference(rounded[j], used);
    used = set_union(used, rounded[j]);
  }
  return Partition(std::move(parts));
}

}  // namespace fairdiv
