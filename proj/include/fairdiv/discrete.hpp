#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "fairdiv/rational.hpp"
#include "fairdiv/rng.hpp"

namespace fairdiv {

/// Utility matrix for indivisible goods: one row per player, one column per
/// good, every entry an integer in {1, ..., M}. Zero-valued goods are
/// rejected up front; the binning and the floor guarantee both assume the
/// model range.
class DiscreteProfile {
 public:
  DiscreteProfile(int64_t utility_cap, std::vector<std::vector<int64_t>> utilities)
      : cap_(utility_cap), utilities_(std::move(utilities)) {
    if (cap_ < 1) throw std::invalid_argument("M must be at least 1");
    if (utilities_.empty())
      throw std::invalid_argument("profile needs at least one player");
    const size_t n = utilities_.front().size();
    for (size_t i = 0; i < utilities_.size(); ++i) {
      if (utilities_[i].size() != n)
        throw std::invalid_argument("utility rows must all have the same length");
      for (size_t j = 0; j < n; ++j)
        if (utilities_[i][j] < 1 || utilities_[i][j] > cap_)
          throw std::invalid_argument(
              "utilities[" + std::to_string(i) + "][" + std::to_string(j) + "] = " +
              std::to_string(utilities_[i][j]) + " outside the model range {1,...,M}");
    }
  }

  int64_t utility_cap() const { return cap_; }
  size_t players() const { return utilities_.size(); }
  size_t goods() const { return utilities_.front().size(); }
  int64_t utility(size_t player, size_t good) const { return utilities_[player][good]; }
  const std::vector<int64_t>& row(size_t player) const { return utilities_.at(player); }
  const std::vector<std::vector<int64_t>>& utilities() const { return utilities_; }

  int64_t total(size_t player) const {
    int64_t sum = 0;
    for (int64_t u : utilities_.at(player)) sum += u;
    return sum;
  }

  bool operator==(const DiscreteProfile&) const = default;

 private:
  int64_t cap_;
  std::vector<std::vector<int64_t>> utilities_;
};

// Goods sharing one declared utility column.
struct BinIndex {
  std::vector<int64_t> signature;  // declared utility vector common to all members
  std::vector<size_t> members;     // good indices
};

enum class Provenance : uint8_t { BinSplit, Leftover, RawRandom };

struct DiscreteAllocation {
  std::vector<size_t> owner;           // owner[j] in [0, parts)
  std::vector<Provenance> provenance;  // how good j was assigned
  size_t parts = 0;
};

// Group goods by their declared utility column. Bins are returned in
// lexicographic signature order, partitioning the goods.
inline std::vector<BinIndex> bin_goods(const DiscreteProfile& declared) {
  std::map<std::vector<int64_t>, std::vector<size_t>> by_signature;
  for (size_t j = 0; j < declared.goods(); ++j) {
    std::vector<int64_t> signature(declared.players());
    for (size_t i = 0; i < declared.players(); ++i) signature[i] = declared.utility(i, j);
    by_signature[std::move(signature)].push_back(j);
  }
  std::vector<BinIndex> bins;
  bins.reserve(by_signature.size());
  for (auto& [signature, members] : by_signature)
    bins.push_back({signature, std::move(members)});
  return bins;
}

inline int64_t owned_value(const DiscreteProfile& profile, const DiscreteAllocation& alloc,
                           size_t player, size_t part) {
  int64_t value = 0;
  for (size_t j = 0; j < alloc.owner.size(); ++j)
    if (alloc.owner[j] == part) value += profile.utility(player, j);
  return value;
}

namespace detail {

inline DiscreteAllocation run_mechanism3(const DiscreteProfile& declared, SeedStream root) {
  const size_t k = declared.players();
  const size_t n = declared.goods();
  DiscreteAllocation alloc{std::vector<size_t>(n), std::vector<Provenance>(n), k};
  SeedStream splits = root.child("bin-split");
  SeedStream leftovers = root.child("leftovers");
  for (const auto& bin : bin_goods(declared)) {
    auto members = bin.members;
    splits.shuffle(members);
    const size_t share = members.size() / k;
    size_t idx = 0;
    for (size_t p = 0; p < k; ++p)
      for (size_t t = 0; t < share; ++t, ++idx) {
        alloc.owner[members[idx]] = p;
        alloc.provenance[members[idx]] = Provenance::BinSplit;
      }
    for (; idx < members.size(); ++idx) {
      alloc.owner[members[idx]] = static_cast<size_t>(leftovers.below(static_cast<uint64_t>(k)));
      alloc.provenance[members[idx]] = Provenance::Leftover;
    }
  }
  return alloc;
}

}  // namespace detail

/// Per bin: a uniformly random split into k equal parts (a seeded shuffle
/// followed by block slicing), the at most k-1 leftovers each going to an
/// independent uniform player. Every good's ownership marginal is exactly
/// 1/k, so the expected value of any player's share is her total over k
/// whatever anyone declares.
inline DiscreteAllocation mechanism3(const DiscreteProfile& declared, uint64_t seed) {
  return detail::run_mechanism3(declared, SeedStream(seed));
}

/// Deterministic guarantee for a truthful player under mechanism3:
/// total/k - M * M^k, one value per player. At most M^k bins each withhold at
/// most k-1 leftover goods worth at most M.
inline std::vector<Rational> fairness_floor(const DiscreteProfile& profile) {
  const Integer k(profile.players());
  Integer power = 1;
  for (size_t i = 0; i < profile.players(); ++i) power *= profile.utility_cap();
  const Rational slack(Integer(profile.utility_cap()) * power);
  std::vector<Rational> floors;
  floors.reserve(profile.players());
  for (size_t i = 0; i < profile.players(); ++i)
    floors.push_back(Rational(Integer(profile.total(i)), k) - slack);
  return floors;
}

// Strict test: every player's value for her own share exceeds her declared
// total over k. Exact integer comparison.
inline bool superfair_check_discrete(const DiscreteProfile& profile,
                                     const DiscreteAllocation& alloc) {
  if (alloc.owner.size() != profile.goods() || alloc.parts != profile.players())
    throw std::invalid_argument("allocation shape does not match profile");
  const int64_t k = static_cast<int64_t>(profile.players());
  for (size_t i = 0; i < profile.players(); ++i)
    if (k * owned_value(profile, alloc, i, i) <= profile.total(i)) return false;
  return true;
}

/// One uniform draw over all k^n assignments; keep it when every player's
/// declared value strictly exceeds her declared total over k, otherwise run
/// mechanism3 on an independent sub-stream. Exactly one draw, for the same
/// truthfulness reason as the continuous variant.
inline DiscreteAllocation mechanism4(const DiscreteProfile& declared, uint64_t seed) {
  SeedStream root(seed);
  const size_t k = declared.players();
  const size_t n = declared.goods();
  DiscreteAllocation drawn{std::vector<size_t>(n),
                           std::vector<Provenance>(n, Provenance::RawRandom), k};
  SeedStream draw = root.child("draw");
  for (size_t j = 0; j < n; ++j)
    drawn.owner[j] = static_cast<size_t>(draw.below(static_cast<uint64_t>(k)));
  if (superfair_check_discrete(declared, drawn)) return drawn;
  return detail::run_mechanism3(declared, root.child("fallback"));
}

// True when mechanism4 kept its raw draw. A fallback allocation carries
// bin-split and leftover tags, never raw-random ones.
inline bool mechanism4_accepted(const DiscreteAllocation& alloc) {
  if (alloc.owner.empty()) return false;
  for (Provenance p : alloc.provenance)
    if (p != Provenance::RawRandom) return false;
  return true;
}

// The error scale M * k * M^k / n of the bounded-utilities regime.
inline Rational regime_epsilon(int64_t utility_cap, size_t players, size_t goods) {
  if (goods == 0) throw std::invalid_argument("regime scale needs at least one good");
  Integer power = 1;
  for (size_t i = 0; i < players; ++i) power *= utility_cap;
  return Rational(Integer(utility_cap) * Integer(players) * power, Integer(goods));
}

inline Rational regime_epsilon(const DiscreteProfile& profile) {
  return regime_epsilon(profile.utility_cap(), profile.players(), profile.goods());
}

// Records a chosen epsilon together with the instance parameters it must
// dominate.
struct EpsilonBound {
  Rational epsilon;
  int64_t M;
  size_t k;
  size_t n;

  EpsilonBound(Rational eps, int64_t utility_cap, size_t players, size_t goods)
      : epsilon(std::move(eps)), M(utility_cap), k(players), n(goods) {
    if (epsilon < regime_epsilon(M, k, n))
      throw std::invalid_argument("epsilon below the regime scale M*k*M^k/n");
  }
};

}  // namespace fairdiv
