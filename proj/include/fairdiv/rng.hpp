#pragma once

#include <cstdint>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string_view>
#include <vector>

#include "fairdiv/rational.hpp"

namespace fairdiv {

namespace detail {

constexpr uint64_t splitmix64(uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr uint64_t fnv1a64(std::string_view s) {
  uint64_t h = 1469598103934665603ULL;
  for (char c : s) {
    h ^= static_cast<unsigned char>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace detail

/// Deterministic random stream with named sub-streams. Children derive from
/// the stream's seed, not from its consumption state, so adding draws to one
/// code path never shifts the values an unrelated path sees. All sampling is
/// exact: bounded draws use rejection, Bernoulli trials compare an exact
/// uniform integer against the rational parameter.
class SeedStream {
 public:
  explicit SeedStream(uint64_t seed) : seed_(seed), engine_(seed) {}

  uint64_t seed() const { return seed_; }

  SeedStream child(std::string_view name) const {
    return SeedStream(detail::splitmix64(seed_ ^ detail::fnv1a64(name)));
  }

  SeedStream child(uint64_t index) const {
    return SeedStream(detail::splitmix64(seed_ ^ detail::splitmix64(index + 0x632be59bd9b4e019ULL)));
  }

  uint64_t next() { return engine_(); }

  // Unbiased uniform draw from [0, bound).
  uint64_t below(uint64_t bound) {
    if (bound == 0) throw std::logic_error("uniform draw from an empty range");
    if (bound == 1) return 0;
    const uint64_t max = std::numeric_limits<uint64_t>::max();
    const uint64_t limit = (max / bound) * bound;
    uint64_t r;
    do {
      r = engine_();
    } while (r >= limit);
    return r % bound;
  }

  Integer below(const Integer& bound) {
    if (bound <= 0) throw std::logic_error("uniform draw from an empty range");
    if (bound == 1) return 0;
    const unsigned bits = boost::multiprecision::msb(bound) + 1;
    const unsigned words = (bits + 63) / 64;
    for (;;) {
      Integer r = 0;
      for (unsigned w = 0; w < words; ++w) r = (r << 64) | Integer(engine_());
      r >>= words * 64 - bits;
      if (r < bound) return r;
    }
  }

  bool bernoulli(const Rational& p) {
    if (p <= 0) return false;
    if (p >= 1) return true;
    return below(Integer(denominator(p))) < numerator(p);
  }

  // Number of exact Bernoulli trials until the first success; support {1,2,...}.
  uint64_t geometric(const Rational& success) {
    if (!(success > 0 && success <= 1))
      throw std::invalid_argument("geometric parameter must lie in (0,1]");
    uint64_t count = 1;
    while (!bernoulli(success)) ++count;
    return count;
  }

  template <class T>
  void shuffle(std::vector<T>& v) {
    for (size_t i = v.size(); i > 1; --i)
      std::swap(v[i - 1], v[below(static_cast<uint64_t>(i))]);
  }

  // Uniform draw from all k! permutations.
  std::vector<size_t> permutation(size_t k) {
    std::vector<size_t> p(k);
    std::iota(p.begin(), p.end(), size_t{0});
    shuffle(p);
    return p;
  }

 private:
  uint64_t seed_;
  std::mt19937_64 engine_;
};

}  // namespace fairdiv
