#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fairdiv/discrete.hpp"
#include "fairdiv/rational.hpp"
#include "fairdiv/rng.hpp"

namespace fairdiv {

/// Per-good ownership fractions: rows are parts, columns are goods, every
/// entry in [0,1] and every column summing to exactly 1. Parts need not
/// coincide with players; the common case has one part per player.
class FractionMatrix {
 public:
  explicit FractionMatrix(std::vector<std::vector<Rational>> rows)
      : rows_(std::move(rows)) {
    if (rows_.empty())
      throw std::invalid_argument("fraction matrix needs at least one part");
    const size_t goods = rows_.front().size();
    for (const auto& row : rows_) {
      if (row.size() != goods)
        throw std::invalid_argument("fraction rows must all have the same length");
      for (const auto& f : row)
        if (f < 0 || f > 1)
          throw std::invalid_argument("fractions must lie in [0,1]");
    }
    for (size_t j = 0; j < goods; ++j) {
      Rational column = 0;
      for (const auto& row : rows_) column += row[j];
      if (column != 1)
        throw std::invalid_argument("fraction column " + std::to_string(j) +
                                    " sums to " + format_rational(column) +
                                    ", expected exactly 1");
    }
  }

  size_t parts() const { return rows_.size(); }
  size_t goods() const { return rows_.front().size(); }
  const Rational& at(size_t part, size_t good) const { return rows_.at(part).at(good); }
  const std::vector<std::vector<Rational>>& rows() const { return rows_; }

 private:
  std::vector<std::vector<Rational>> rows_;
};

// players x parts matrix of exact expected values; row i sums to player i's
// total because the parts distribute every good fully.
using TargetMatrix = std::vector<std::vector<Rational>>;

inline TargetMatrix extension_value(const DiscreteProfile& profile,
                                    const FractionMatrix& fractions) {
  if (fractions.goods() != profile.goods())
    throw std::invalid_argument("fraction matrix does not match the profile's goods");
  TargetMatrix target(profile.players(),
                      std::vector<Rational>(fractions.parts(), Rational(0)));
  for (size_t i = 0; i < profile.players(); ++i)
    for (size_t p = 0; p < fractions.parts(); ++p) {
      Rational sum = 0;
      for (size_t j = 0; j < profile.goods(); ++j)
        sum += Integer(profile.utility(i, j)) * fractions.at(p, j);
      target[i][p] = sum;
    }
  return target;
}

namespace detail {

// Cumulative integer thresholds over a common denominator; draws are exact.
struct CategoricalSampler {
  bool small = true;
  uint64_t total64 = 1;
  std::vector<uint64_t> cum64;
  Integer total = 1;
  std::vector<Integer> cum;

  static CategoricalSampler from_weights(const std::vector<Rational>& probs) {
    Integer common = 1;
    for (const auto& p : probs) common = lcm(common, Integer(denominator(p)));
    CategoricalSampler s;
    s.total = 0;
    for (const auto& p : probs) {
      s.total += numerator(p) * (common / denominator(p));
      s.cum.push_back(s.total);
    }
    if (s.total <= std::numeric_limits<uint64_t>::max()) {
      s.small = true;
      s.total64 = s.total.convert_to<uint64_t>();
      for (const auto& c : s.cum) s.cum64.push_back(c.convert_to<uint64_t>());
    } else {
      s.small = false;
    }
    return s;
  }

  size_t sample(SeedStream& stream) const {
    if (small) {
      const uint64_t r = stream.below(total64);
      size_t i = 0;
      while (r >= cum64[i]) ++i;
      return i;
    }
    const Integer r = stream.below(total);
    size_t i = 0;
    while (r >= cum[i]) ++i;
    return i;
  }
};

}  // namespace detail

/// Give good j to part i with probability exactly fractions[i][j],
/// independently per good. The expected value matrix equals
/// extension_value(profile, fractions).
inline DiscreteAllocation random_scheme(const DiscreteProfile& profile,
                                        const FractionMatrix& fractions, uint64_t seed) {
  if (fractions.goods() != profile.goods())
    throw std::invalid_argument("fraction matrix does not match the profile's goods");
  const size_t n = profile.goods();
  DiscreteAllocation alloc{std::vector<size_t>(n),
                           std::vector<Provenance>(n, Provenance::RawRandom),
                           fractions.parts()};
  SeedStream assign = SeedStream(seed).child("assign");
  std::vector<Rational> column(fractions.parts());
  for (size_t j = 0; j < n; ++j) {
    for (size_t p = 0; p < fractions.parts(); ++p) column[p] = fractions.at(p, j);
    alloc.owner[j] = detail::CategoricalSampler::from_weights(column).sample(assign);
  }
  return alloc;
}

// Replace every entry by its bin mean, so the matrix becomes constant within
// each bin. Value-equivalent for all players: goods in a bin are
// interchangeable under the declared utilities.
inline FractionMatrix average_within_bins(const DiscreteProfile& profile,
                                          const FractionMatrix& fractions) {
  if (fractions.goods() != profile.goods())
    throw std::invalid_argument("fraction matrix does not match the profile's goods");
  auto rows = fractions.rows();
  for (const auto& bin : bin_goods(profile)) {
    for (size_t p = 0; p < fractions.parts(); ++p) {
      Rational mean = 0;
      for (size_t j : bin.members) mean += rows[p][j];
      mean /= Integer(bin.members.size());
      for (size_t j : bin.members) rows[p][j] = mean;
    }
  }
  return FractionMatrix(std::move(rows));
}

/// From each bin of size m, part i receives exactly floor(m * D_i) goods via
/// a uniform split (seeded shuffle plus block slicing); the remaining goods
/// are drawn from the residual fractional weights m * D_i - floor(m * D_i),
/// which makes the expected per-bin count exactly m * D_i. Requires the
/// fractions to be constant within each bin; run average_within_bins first
/// otherwise. For truthful profiles every realized value sits within
/// [target - eps * total, target + k * eps * total] with eps = M*k*M^k/n.
inline DiscreteAllocation binned_scheme(const DiscreteProfile& profile,
                                        const FractionMatrix& fractions, uint64_t seed) {
  if (fractions.goods() != profile.goods())
    throw std::invalid_argument("fraction matrix does not match the profile's goods");
  const size_t n = profile.goods();
  const size_t parts = fractions.parts();
  DiscreteAllocation alloc{std::vector<size_t>(n), std::vector<Provenance>(n), parts};
  SeedStream root(seed);
  SeedStream splits = root.child("bin-split");
  SeedStream leftovers = root.child("leftovers");
  for (const auto& bin : bin_goods(profile)) {
    for (size_t j : bin.members)
      for (size_t p = 0; p < parts; ++p)
        if (fractions.at(p, j) != fractions.at(p, bin.members.front()))
          throw std::invalid_argument(
              "fractions must be constant within each bin; "
              "apply average_within_bins first");

    const size_t m = bin.members.size();
    std::vector<size_t> counts(parts);
    std::vector<Rational> residuals(parts);
    size_t assigned = 0;
    for (size_t p = 0; p < parts; ++p) {
      const Rational share = Integer(m) * fractions.at(p, bin.members.front());
      const Integer floor_count = numerator(share) / denominator(share);
      counts[p] = floor_count.convert_to<size_t>();
      residuals[p] = share - floor_count;
      assigned += counts[p];
    }

    auto members = bin.members;
    splits.shuffle(members);
    size_t idx = 0;
    for (size_t p = 0; p < parts; ++p)
      for (size_t t = 0; t < counts[p]; ++t, ++idx) {
        alloc.owner[members[idx]] = p;
        alloc.provenance[members[idx]] = Provenance::BinSplit;
      }

    if (assigned < m) {
      const auto sampler = detail::CategoricalSampler::from_weights(residuals);
      for (; idx < m; ++idx) {
        alloc.owner[members[idx]] = sampler.sample(leftovers);
        alloc.provenance[members[idx]] = Provenance::Leftover;
      }
    }
  }
  return alloc;
}

}  // namespace fairdiv
