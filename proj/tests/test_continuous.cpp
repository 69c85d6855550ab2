#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fairdiv/continuous.hpp"
#include "test_support.hpp"

using namespace fairdiv;

namespace {

const StepMeasure kUniform = StepMeasure::uniform();
const StepMeasure kFrontLoaded({Rational(0), Rational(1, 2), Rational(1)},
                               {Rational(2), Rational(0)});
const StepMeasure kTailSpike({Rational(0), Rational(3, 4), Rational(1)},
                             {Rational(0), Rational(4)});

IntervalSet span(const Rational& lo, const Rational& hi) {
  return IntervalSet({{lo, hi}});
}

// Exhaustive mean over all k! piece assignments, independent of the sampled
// permutation path.
std::vector<Rational> permutation_average(const std::vector<StepMeasure>& true_measures,
                                          const Partition& split) {
  const size_t k = split.size();
  std::vector<size_t> perm(k);
  std::iota(perm.begin(), perm.end(), size_t{0});
  std::vector<Rational> sum(k, Rational(0));
  Integer count = 0;
  do {
    for (size_t i = 0; i < k; ++i)
      sum[i] += measure_of(true_measures[i], split.part(perm[i]));
    ++count;
  } while (std::next_permutation(perm.begin(), perm.end()));
  for (auto& s : sum) s /= count;
  return sum;
}

}  // namespace

TEST_CASE("equal partition on worked examples") {
  SECTION("two uniform players get the two halves") {
    const Partition p = equal_partition({kUniform, kUniform});
    CHECK(p.part(0) == span(Rational(0), Rational(1, 2)));
    CHECK(p.part(1) == span(Rational(1, 2), Rational(1)));
  }

  SECTION("uniform vs front-loaded splits every refinement cell") {
    const Partition p = equal_partition({kUniform, kFrontLoaded});
    CHECK(p.part(0) == IntervalSet({{Rational(0), Rational(1, 4)},
                                    {Rational(1, 2), Rational(3, 4)}}));
    CHECK(p.part(1) == IntervalSet({{Rational(1, 4), Rational(1, 2)},
                                    {Rational(3, 4), Rational(1)}}));
    for (const auto& m : {kUniform, kFrontLoaded})
      for (size_t j = 0; j < 2; ++j)
        CHECK(measure_of(m, p.part(j)) == Rational(1, 2));
  }

  SECTION("three uniform players get thirds") {
    const Partition p = equal_partition({kUniform, kUniform, kUniform});
    for (size_t j = 0; j < 3; ++j) {
      CHECK(p.part(j).total_length() == Rational(1, 3));
      CHECK(measure_of(kUniform, p.part(j)) == Rational(1, 3));
    }
  }

  CHECK_THROWS_AS(equal_partition({}), std::invalid_argument);
}

TEST_CASE("equal partition gives every declared measure exactly 1/k of each part") {
  SeedStream rng(77);
  for (int round = 0; round < 40; ++round) {
    const size_t k = 1 + rng.below(uint64_t{5});
    const auto declared = testsupport::random_profile_continuous(rng, k);
    const Partition p = equal_partition(declared);
    const Rational share(1, Integer(k));
    for (size_t i = 0; i < k; ++i)
      for (size_t j = 0; j < k; ++j)
        CHECK(measure_of(declared[i], p.part(j)) == share);
  }
}

TEST_CASE("mechanism 1") {
  SECTION("a single player gets the whole cake regardless of seed") {
    for (uint64_t seed : {0ull, 1ull, 99ull}) {
      const auto alloc = mechanism1({kUniform}, seed);
      CHECK(alloc.pieces[0] == IntervalSet::unit());
    }
  }

  SECTION("truthful players realize exactly 1/k on every run") {
    const std::vector<StepMeasure> profile{kUniform, kFrontLoaded, kTailSpike};
    for (uint64_t seed = 0; seed < 25; ++seed) {
      const auto alloc = mechanism1(profile, seed);
      for (size_t i = 0; i < profile.size(); ++i)
        CHECK(measure_of(profile[i], alloc.pieces[i]) == Rational(1, 3));
    }
  }

  SECTION("exhaustive permutation mean is 1/k for any declaration") {
    SeedStream rng(31337);
    for (size_t k = 2; k <= 4; ++k) {
      const auto truth = testsupport::random_profile_continuous(rng, k);
      const auto declared = testsupport::random_profile_continuous(rng, k);
      const auto avg = permutation_average(truth, equal_partition(declared));
      for (size_t i = 0; i < k; ++i) CHECK(avg[i] == Rational(1, Integer(k)));
    }
  }

  SECTION("the permutation varies with the seed but never the piece values") {
    const std::vector<StepMeasure> profile{kUniform, kFrontLoaded};
    const auto a = mechanism1(profile, 1);
    const auto b = mechanism1(profile, 2);
    CHECK(a.permutation_used);
    CHECK(b.permutation_used);
    CHECK(measure_of(kUniform, a.pieces[0]) == measure_of(kUniform, b.pieces[0]));
  }
}

TEST_CASE("rational partition sampler") {
  SECTION("k=1 always yields the trivial partition") {
    for (uint64_t seed = 0; seed < 20; ++seed) {
      const Partition p = sample_rational_partition(1, {Rational(1, 2), seed});
      CHECK(p.part(0) == IntervalSet::unit());
    }
  }

  SECTION("deterministic in the seed") {
    const QSamplerConfig config{Rational(1, 2), 424242};
    CHECK(sample_rational_partition(3, config) == sample_rational_partition(3, config));
  }

  SECTION("halting parameter is validated") {
    CHECK_THROWS_AS(sample_rational_partition(2, {Rational(0), 1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(sample_rational_partition(2, {Rational(1), 1}),
                    std::invalid_argument);
    CHECK_THROWS_AS(sample_rational_partition(0, {Rational(1, 2), 1}),
                    std::invalid_argument);
  }

  SECTION("grid labels out of range are rejected") {
    CHECK_THROWS_AS(uniform_grid_partition(2, {0, 2}, 2), std::invalid_argument);
    CHECK_THROWS_AS(uniform_grid_partition(2, {0}, 2), std::invalid_argument);
  }

  SECTION("the trivial partition appears at its closed-form rate") {
    // all-cells-to-player-1 has minimal denominator 1; with halting 1/2 and
    // k=2 its total probability is sum_m 4^-m = 1/3
    const Partition trivial = uniform_grid_partition(1, {0}, 2);
    const uint64_t samples = 20000;
    uint64_t hits = 0;
    for (uint64_t seed = 0; seed < samples; ++seed)
      if (sample_rational_partition(2, {Rational(1, 2), seed}) == trivial) ++hits;
    const double expected = samples / 3.0;
    const double sigma = std::sqrt(samples * (1.0 / 3.0) * (2.0 / 3.0));
    CHECK(std::abs(static_cast<double>(hits) - expected) <= 5.0 * sigma);
  }
}

TEST_CASE("super-fairness test") {
  const Partition halves = equal_partition({kUniform, kUniform});
  CHECK_FALSE(is_superfair({kUniform, kUniform}, halves));  // values sum to 1

  // strictness at k=1: the whole cake is worth exactly 1, not more
  const Partition whole = equal_partition({kUniform});
  CHECK_FALSE(is_superfair({kUniform}, whole));

  const Partition tilted(
      {span(Rational(0), Rational(3, 4)), span(Rational(3, 4), Rational(1))});
  CHECK(is_superfair({kUniform, kTailSpike}, tilted));
  CHECK(measure_of(kUniform, tilted.part(0)) == Rational(3, 4));
  CHECK(measure_of(kTailSpike, tilted.part(1)) == 1);

  CHECK_THROWS_AS(is_superfair({kUniform}, halves), std::invalid_argument);
}

TEST_CASE("mechanism 2") {
  SECTION("identical declarations always fall back and pay exactly 1/k") {
    const std::vector<StepMeasure> same{kFrontLoaded, kFrontLoaded};
    for (uint64_t seed = 0; seed < 200; ++seed) {
      const auto alloc = mechanism2(same, {Rational(1, 2), seed});
      CHECK_FALSE(alloc.superfair_accepted);
      for (size_t i = 0; i < 2; ++i)
        CHECK(measure_of(kFrontLoaded, alloc.pieces[i]) == Rational(1, 2));
    }
  }

  SECTION("a super-fair draw is accepted and pays everyone more than 1/k") {
    const std::vector<StepMeasure> profile{kUniform, kTailSpike};
    bool found = false;
    for (uint64_t seed = 0; seed < 5000 && !found; ++seed) {
      const auto alloc = mechanism2(profile, {Rational(1, 2), seed});
      if (!alloc.superfair_accepted) continue;
      found = true;
      CHECK_FALSE(alloc.permutation_used.has_value());
      for (size_t i = 0; i < 2; ++i)
        CHECK(measure_of(profile[i], alloc.pieces[i]) > Rational(1, 2));
    }
    CHECK(found);
  }

  SECTION("a truthful player never falls below 1/k, liars notwithstanding") {
    const std::vector<StepMeasure> truth{kUniform, kUniform};
    const std::vector<StepMeasure> declared{kUniform, kTailSpike};  // player 2 lies
    for (uint64_t seed = 0; seed < 500; ++seed) {
      const auto alloc = mechanism2(declared, {Rational(1, 2), seed});
      CHECK(measure_of(truth[0], alloc.pieces[0]) >= Rational(1, 2));
    }
  }

  SECTION("the fallback stream is independent of the draw stream") {
    // same master seed: the fallback permutation matches a direct mechanism1
    // call on the derived sub-seed
    const std::vector<StepMeasure> same{kUniform, kUniform};
    const uint64_t seed = 99;
    const auto via_mech2 = mechanism2(same, {Rational(1, 2), seed});
    const auto direct = mechanism1(same, SeedStream(seed).child("fallback").seed());
    CHECK(via_mech2.pieces == direct.pieces);
    CHECK(via_mech2.permutation_used == direct.permutation_used);
  }
}

TEST_CASE("rational approximation of real-endpoint partitions") {
  SECTION("targets already on the rational grid come back unchanged") {
    const std::vector<std::vector<RealInterval>> target{{{0.0, 0.5}}, {{0.5, 1.0}}};
    const Partition q = approximate_by_rational_partition(
        target, {kUniform, kUniform}, Rational(1, 100));
    CHECK(q.part(0) == span(Rational(0), Rational(1, 2)));
    CHECK(q.part(1) == span(Rational(1, 2), Rational(1)));
  }

  SECTION("an irrational cut moves by less than delta") {
    const double cut = std::sqrt(0.5);
    const std::vector<std::vector<RealInterval>> target{{{0.0, cut}}, {{cut, 1.0}}};
    const Rational delta(1, 100);
    const Partition q =
        approximate_by_rational_partition(target, {kUniform, kUniform}, delta);

    const Rational exact_cut = rational_from_double(cut);
    const Rational realized_cut = q.part(0).intervals().front().hi;
    CHECK(abs(realized_cut - exact_cut) < delta);

    // exact post-hoc symmetric differences against the dyadic target
    const IntervalSet target0({{Rational(0), exact_cut}});
    const IntervalSet target1({{exact_cut, Rational(1)}});
    const Rational sym0 =
        measure_of(kUniform, set_symmetric_difference(target0, q.part(0)));
    const Rational sym1 =
        measure_of(kUniform, set_symmetric_difference(target1, q.part(1)));
    CHECK(sym0 < delta);
    CHECK(sym1 < delta);

    SECTION("shrinking delta tightens the realized error") {
      const Partition finer = approximate_by_rational_partition(
          target, {kUniform, kUniform}, Rational(1, 1000));
      const Rational fine_sym = measure_of(
          kUniform, set_symmetric_difference(target0, finer.part(0)));
      CHECK(fine_sym < Rational(1, 1000));
      CHECK(fine_sym <= sym0);
    }
  }

  SECTION("the output is a valid partition even for degenerate input") {
    // overlapping parts and an uncovered gap: the repair still produces an
    // exact partition of [0,1)
    const std::vector<std::vector<RealInterval>> target{{{0.0, 0.6}}, {{0.4, 0.8}}};
    const Partition q = approximate_by_rational_partition(
        target, {kUniform, kUniform}, Rational(1, 50));
    CHECK(q.size() == 2);  // the constructor already validated cover and disjointness
  }

  SECTION("a one-part target collapses to the whole cake") {
    const Partition q = approximate_by_rational_partition({{{0.0, 1.0}}}, {kUniform},
                                                          Rational(1, 10));
    CHECK(q.part(0) == IntervalSet::unit());
  }

  SECTION("validation") {
    CHECK_THROWS_AS(approximate_by_rational_partition({{{0.0, 1.0}}}, {kUniform},
                                                      Rational(0)),
                    std::invalid_argument);
    CHECK_THROWS_AS(approximate_by_rational_partition({{{0.5, 0.2}}}, {kUniform},
                                                      Rational(1, 10)),
                    std::invalid_argument);
    CHECK_THROWS_AS(approximate_by_rational_partition({{{0.0, 2.0}}}, {kUniform},
                                                      Rational(1, 10)),
                    std::invalid_argument);
    CHECK_THROWS_AS(approximate_by_rational_partition({}, {}, Rational(1, 10)),
                    std::invalid_argument);
  }
}
