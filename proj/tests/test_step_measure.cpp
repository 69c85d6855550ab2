#include <catch2/catch_amalgamated.hpp>

#include "fairdiv/step_measure.hpp"
#include "test_support.hpp"

using namespace fairdiv;

namespace {

const StepMeasure kFrontLoaded({Rational(0), Rational(1, 2), Rational(1)},
                               {Rational(2), Rational(0)});

IntervalSet span(const Rational& lo, const Rational& hi) {
  return IntervalSet({{lo, hi}});
}

}  // namespace

TEST_CASE("measure evaluation on worked examples") {
  CHECK(measure_of(StepMeasure::uniform(), span(Rational(0), Rational(1, 2))) ==
        Rational(1, 2));
  CHECK(measure_of(kFrontLoaded, span(Rational(0), Rational(1, 4))) == Rational(1, 2));
  CHECK(measure_of(kFrontLoaded, IntervalSet()) == 0);
  CHECK(measure_of(kFrontLoaded, span(Rational(1, 2), Rational(1))) == 0);
}

TEST_CASE("validation rejects malformed measures") {
  CHECK_THROWS_AS(StepMeasure({Rational(0), Rational(1)}, {Rational(2)}),
                  std::invalid_argument);  // mass 2
  CHECK_THROWS_AS(StepMeasure({Rational(0), Rational(1, 2)}, {Rational(2)}),
                  std::invalid_argument);  // does not end at 1
  CHECK_THROWS_AS(
      StepMeasure({Rational(0), Rational(1, 2), Rational(1, 2), Rational(1)},
                  {Rational(1), Rational(1), Rational(1)}),
      std::invalid_argument);  // repeated breakpoint
  CHECK_THROWS_AS(StepMeasure({Rational(0), Rational(1)}, {Rational(-1)}),
                  std::invalid_argument);
  CHECK_THROWS_AS(StepMeasure({Rational(0), Rational(1)}, {}), std::invalid_argument);
}

TEST_CASE("common refinement on worked examples") {
  const StepMeasure u = StepMeasure::uniform();
  const StepMeasure halves({Rational(0), Rational(1, 2), Rational(1)},
                           {Rational(1), Rational(1)});
  const StepMeasure thirds({Rational(0), Rational(1, 3), Rational(1)},
                           {Rational(1), Rational(1)});

  CHECK(common_refinement({u, halves}) ==
        std::vector<Rational>{Rational(0), Rational(1, 2), Rational(1)});
  CHECK(common_refinement({halves, halves}) == halves.breakpoints());
  CHECK(common_refinement({thirds, halves}) ==
        std::vector<Rational>{Rational(0), Rational(1, 3), Rational(1, 2), Rational(1)});
  CHECK_THROWS_AS(common_refinement({}), std::invalid_argument);
}

TEST_CASE("equality as measures ignores the breakpoint representation") {
  const StepMeasure u = StepMeasure::uniform();
  const StepMeasure split_uniform({Rational(0), Rational(1, 2), Rational(1)},
                                  {Rational(1), Rational(1)});
  CHECK(measures_equal(u, split_uniform));
  CHECK(!(u == split_uniform));  // structural equality is finer
  CHECK_FALSE(measures_equal(u, kFrontLoaded));
}

TEST_CASE("measure properties on random instances") {
  SeedStream rng(321);
  for (int round = 0; round < 150; ++round) {
    const StepMeasure m = testsupport::random_step_measure(rng);
    CHECK(measure_of(m, IntervalSet::unit()) == 1);

    const IntervalSet a = testsupport::random_interval_set(rng);
    const IntervalSet b = testsupport::random_interval_set(rng);

    // finite additivity on disjoint pieces
    const IntervalSet b_only = set_difference(b, a);
    CHECK(measure_of(m, set_union(a, b_only)) ==
          measure_of(m, a) + measure_of(m, b_only));

    // symmetric difference identity
    CHECK(measure_of(m, set_symmetric_difference(a, b)) ==
          measure_of(m, a) + measure_of(m, b) - 2 * measure_of(m, set_intersection(a, b)));

    // monotone under complement split
    CHECK(measure_of(m, a) + measure_of(m, complement(a)) == 1);
  }
}
